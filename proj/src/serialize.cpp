#include "gupeq/serialize.hpp"

#include <cmath>
#include <ostream>

namespace gupeq {

nlohmann::json number_or_inf(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

nlohmann::json to_json(const HLimit& h) {
    return {{"status", to_string(h.status)},
            {"value", number_or_inf(h.value)},
            {"tail_estimate", number_or_inf(h.tail_estimate)},
            {"octaves", h.octaves}};
}

nlohmann::json to_json(const DeficiencyReport& r) {
    auto index = [](int n) -> nlohmann::json { return n < 0 ? nlohmann::json(nullptr) : nlohmann::json(n); };
    auto scan = [](const NormScan& s) {
        return nlohmann::json{{"negative_side", to_string(s.negative_side)},
                              {"positive_side", to_string(s.positive_side)},
                              {"total", to_string(s.total())}};
    };
    return {{"n_plus", index(r.n_plus)},
            {"n_minus", index(r.n_minus)},
            {"minimal_length", r.minimal_length},
            {"total_measure", number_or_inf(r.total_measure)},
            {"verdict", to_string(r.verdict)},
            {"h_plus", to_json(r.bounds.plus)},
            {"h_minus", to_json(r.bounds.minus)},
            {"psi_plus_norm", scan(r.psi_plus)},
            {"psi_minus_norm", scan(r.psi_minus)},
            {"quadrature_agrees", r.quadrature_agrees}};
}

nlohmann::json to_json(const SpectrumResult& s, bool with_vectors) {
    nlohmann::json j{{"N", s.N},
                     {"spacing", s.spacing},
                     {"bc", s.bc.kind == BoundaryCondition::Kind::dirichlet ? "dirichlet" : "quasi_periodic"},
                     {"method", s.method},
                     {"eigenvalues", std::vector<double>(s.eigenvalues.begin(), s.eigenvalues.end())},
                     {"residuals", std::vector<double>(s.residuals.begin(), s.residuals.end())}};
    if (s.bc.kind == BoundaryCondition::Kind::quasi_periodic) j["lambda"] = s.bc.lambda.value();
    if (with_vectors) {
        nlohmann::json cols = nlohmann::json::array();
        for (Eigen::Index c = 0; c < s.eigenvectors.cols(); ++c) {
            nlohmann::json col = nlohmann::json::array();
            for (Eigen::Index r = 0; r < s.eigenvectors.rows(); ++r) {
                col.push_back({s.eigenvectors(r, c).real(), s.eigenvectors(r, c).imag()});
            }
            cols.push_back(std::move(col));
        }
        j["eigenvectors"] = std::move(cols);
    }
    return j;
}

void write_spectrum_csv(std::ostream& os, const SpectrumResult& s) {
    const auto old = os.precision(17);
    os << "index,eigenvalue,residual\n";
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
        os << i << ',' << s.eigenvalues(i) << ',' << s.residuals(i) << '\n';
    }
    os.precision(old);
}

}  // namespace gupeq
