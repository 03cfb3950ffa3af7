#include "gupeq/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "gupeq/errors.hpp"
#include "gupeq/exact.hpp"
#include "gupeq/selfadj.hpp"
#include "gupeq/serialize.hpp"
#include "gupeq/spectra.hpp"

namespace gupeq {

namespace {

using ojson = nlohmann::ordered_json;

struct RunConfig {
    std::string f_source;
    std::optional<double> beta;
    double hbar = 1.0;
    std::optional<double> cutoff;
    double quad_tol = 1e-10;
    std::optional<int> N;
    int levels = 6;
    std::string system;
    std::string rep = "T";
    std::string k_form = "similarity";
    double m = 1.0;
    double omega = 1.0;
    double g_accel = 1.0;
    double energy = 1.0;
    double lambda = 0.0;
    int k_lo = -3;
    int k_hi = 3;
    double bump_center = 0.0;
    std::optional<double> bump_width;
    std::string format = "csv";
    std::string out_path;
    std::string sweep;
};

// One command's result: a table plus summary values.
struct CommandOutput {
    std::vector<std::string> columns;
    std::vector<std::vector<ojson>> rows;
    ojson summary = ojson::object();
    int exit_code = kExitOk;
};

// ---------------------------------------------------------------------------
// helpers

std::string deformation_source(const RunConfig& c) {
    if (c.beta) return fmt::format("1+{}*p^2", *c.beta);
    if (c.f_source.empty()) throw ValidationError("one of --f or --beta is required");
    return c.f_source;
}

GupTheory make_theory(const RunConfig& c, double default_cutoff) {
    const double X = c.cutoff.value_or(default_cutoff);
    if (!(X > 0.0) || !std::isfinite(X)) throw ValidationError("--X must be positive and finite");
    TheoryOptions o;
    o.hbar = c.hbar;
    o.cutoff = X;
    o.quad_tol = c.quad_tol;
    return GupTheory(make_deformation(deformation_source(c), {-X, X}), o);
}

// beta >= 0 when f(p) = 1 + beta p^2 to rounding at a few probe points.
std::optional<double> detect_quadratic(const GupTheory& t) {
    try {
        if (std::fabs(t.deformation()(0.0) - 1.0) > 1e-14) return std::nullopt;
        const double b = t.deformation()(1.0) - 1.0;
        if (b < 0.0) return std::nullopt;
        for (double p : {0.5, -1.3, 2.0, 3.7, -7.1}) {
            const double want = 1.0 + b * p * p;
            if (std::fabs(t.deformation()(p) - want) > 1e-12 * want) return std::nullopt;
        }
        return b;
    } catch (const DomainError&) {
        return std::nullopt;
    }
}

RepKind parse_rep(const std::string& s) {
    if (s == "T") return RepKind::T;
    if (s == "K") return RepKind::K;
    if (s == "polymer") return RepKind::polymer;
    throw ValidationError("unknown representation '" + s + "'");
}

KForm parse_k_form(const std::string& s) {
    return s == "symmetrized" ? KForm::symmetrized : KForm::similarity;
}

int grid_size(const RunConfig& c, int fallback) {
    const int n = c.N.value_or(fallback);
    if (n < kMinGridNodes) {
        throw ValidationError(fmt::format("--N must be at least {}", kMinGridNodes));
    }
    return n;
}

ojson order_or_null(double coarse, double fine) {
    if (!(fine > 0.0) || !std::isfinite(coarse / fine)) return nullptr;
    return coarse / fine;
}

double bump_half_width(const RunConfig& c, double fallback) {
    const double w = c.bump_width.value_or(fallback);
    if (!(w > 0.0)) throw ValidationError("--bump-width must be positive");
    return w;
}

// ---------------------------------------------------------------------------
// commands

CommandOutput cmd_analyze(const RunConfig& c) {
    const GupTheory theory = make_theory(c, 20.0);
    const DeficiencyReport r = deficiency_indices(theory);
    CommandOutput o;
    o.columns = {"key", "value"};
    const ojson report = ojson::parse(to_json(r).dump());
    for (const auto& [k, v] : report.items()) {
        if (v.is_object()) continue;
        o.rows.push_back({k, v});
    }
    std::string polymer = "indeterminate";
    if (r.determinate()) polymer = to_string(polymer_inequivalence(r));
    o.rows.push_back({"polymer_verdict", polymer});
    o.summary["deformation"] = theory.deformation().source;
    o.summary["report"] = report;
    o.summary["polymer_verdict"] = polymer;
    if (!r.determinate()) o.exit_code = kExitIndeterminate;
    return o;
}

CommandOutput cmd_spectrum_ho(const RunConfig& c) {
    const GupTheory theory = make_theory(c, 20.0);
    HONumericOptions opt;
    opt.rep = parse_rep(c.rep);
    opt.k_form = parse_k_form(c.k_form);
    opt.N = grid_size(c, 1200);
    if (c.levels < 1 || c.levels > opt.N) throw ValidationError("--n must lie in [1, N]");

    HOExactParams params;
    params.m = c.m;
    params.omega = c.omega;
    params.hbar = c.hbar;
    const std::optional<double> beta = detect_quadratic(theory);
    if (beta && *beta > 0.0) params.beta = *beta;

    const SpectrumResult s = ho_numeric(theory, params, opt);
    CommandOutput o;
    o.columns = {"n", "E_numeric", "E_exact", "rel_err", "residual"};
    double worst = 0.0;
    for (int n = 0; n < c.levels; ++n) {
        ojson exact = nullptr;
        ojson rel = nullptr;
        if (beta) {
            const double e = *beta > 0.0 ? ho_spectrum_exact(params, n) : c.hbar * c.omega * (n + 0.5);
            const double err = std::fabs(s.eigenvalues(n) - e) / std::fabs(e);
            worst = std::max(worst, err);
            exact = e;
            rel = err;
        }
        o.rows.push_back({n, s.eigenvalues(n), exact, rel, s.residuals(n)});
    }
    o.summary["deformation"] = theory.deformation().source;
    o.summary["system"] = "ho";
    o.summary["rep"] = c.rep;
    if (opt.rep == RepKind::K) o.summary["k_form"] = c.k_form;
    o.summary["N"] = opt.N;
    o.summary["X"] = theory.cutoff();
    o.summary["method"] = s.method;
    o.summary["max_rel_err"] = beta ? ojson(worst) : ojson(nullptr);
    return o;
}

FreefallParams freefall_params(const RunConfig& c) {
    FreefallParams p;
    p.energy = c.energy;
    p.mass = c.m;
    p.g_accel = c.g_accel;
    p.validate();
    return p;
}

void add_ode_rows(CommandOutput& o, const GupTheory& theory, const FreefallParams& p, int n) {
    const OdeResidual coarse = freefall_ode_residual(theory, p, build_grid(theory, n, GridVariable::x_momentum));
    const OdeResidual fine = freefall_ode_residual(theory, p, build_grid(theory, 2 * n, GridVariable::x_momentum));
    o.columns = {"N", "max_abs", "rms"};
    o.rows.push_back({n, coarse.max_abs, coarse.rms});
    o.rows.push_back({2 * n, fine.max_abs, fine.rms});
    o.summary["ode_order_ratio"] = order_or_null(coarse.rms, fine.rms);
}

CommandOutput cmd_spectrum_freefall(const RunConfig& c) {
    const GupTheory theory = make_theory(c, 5.0);
    const FreefallParams p = freefall_params(c);
    CommandOutput o;
    add_ode_rows(o, theory, p, grid_size(c, 800));
    o.summary["deformation"] = theory.deformation().source;
    o.summary["system"] = "freefall";
    o.summary["E"] = p.energy;
    o.summary["X"] = theory.cutoff();
    return o;
}

CommandOutput cmd_spectrum(const RunConfig& c) {
    if (c.system == "ho") return cmd_spectrum_ho(c);
    if (c.system == "freefall") return cmd_spectrum_freefall(c);
    throw ValidationError("--system must be ho or freefall");
}

CommandOutput cmd_map_check(const RunConfig& c) {
    const GupTheory theory = make_theory(c, 20.0);
    const int n0 = grid_size(c, 400);
    const double half = bump_half_width(c, 0.5 * theory.cutoff());
    CommandOutput o;
    o.columns = {"N", "isometry", "uu_inverse", "similarity_gap", "symmetrized_gap"};
    std::vector<double> sym_gaps;
    for (int n : {n0, 2 * n0}) {
        const Grid grid = build_grid(theory, n, GridVariable::x_momentum);
        const DiagonalMap u = unitary_map(theory, grid, MapDirection::T_to_K);
        const DiagonalMap ui = unitary_map(theory, grid, MapDirection::K_to_T);
        const Eigen::VectorXd wk = Eigen::VectorXd::Constant(n, grid.spacing);

        std::mt19937_64 rng(20240501);
        std::normal_distribution<double> normal;
        double iso = 0.0;
        for (int t = 0; t < 100; ++t) {
            Eigen::VectorXcd v(n);
            for (int i = 0; i < n; ++i) v(i) = cplx(normal(rng), normal(rng));
            const double nt = weighted_norm(v, grid.weights);
            const Eigen::VectorXcd uv = u.diagonal().cast<cplx>().cwiseProduct(v);
            iso = std::max(iso, std::fabs(weighted_norm(uv, wk) - nt) / nt);
        }
        const double uu = (u.diagonal().cwiseProduct(ui.diagonal()).array() - 1.0).abs().maxCoeff();

        const auto bc = BoundaryCondition::dirichlet();
        const RepTriple t = build_T(theory, grid, bc);
        const RepTriple ksim = build_K(theory, grid, bc, KForm::similarity);
        const RepTriple ksym = build_K(theory, grid, bc, KForm::symmetrized);
        const Eigen::MatrixXcd mapped =
            u.diagonal().cast<cplx>().asDiagonal() * t.q_matrix * ui.diagonal().cast<cplx>().asDiagonal();
        const double sim_gap =
            (mapped - ksim.q_matrix).cwiseAbs().maxCoeff() / ksim.q_matrix.cwiseAbs().maxCoeff();
        const Eigen::VectorXcd b = bump_vector(grid.nodes, c.bump_center, half);
        const double sym_gap = weighted_norm((mapped - ksym.q_matrix) * b, wk) / weighted_norm(b, wk);
        sym_gaps.push_back(sym_gap);
        o.rows.push_back({n, iso, uu, sim_gap, sym_gap});
    }
    o.summary["deformation"] = theory.deformation().source;
    o.summary["X"] = theory.cutoff();
    o.summary["symmetrized_order_ratio"] = order_or_null(sym_gaps[0], sym_gaps[1]);
    return o;
}

CommandOutput cmd_lattice(const RunConfig& c) {
    const GupTheory theory = make_theory(c, 20.0);
    const ExtensionParam lambda(c.lambda);
    const int n = grid_size(c, 800);
    if (n < 2 * kMinGridNodes) throw ValidationError("--N must be at least 32 for the lattice study");
    const std::vector<double> q = position_lattice(theory, lambda, c.k_lo, c.k_hi);
    CommandOutput o;
    o.columns = {"k", "q_k"};
    for (int k = c.k_lo; k <= c.k_hi; ++k) o.rows.push_back({k, q[static_cast<std::size_t>(k - c.k_lo)]});

    const LatticeNumeric coarse = lattice_numeric(theory, lambda, n / 2);
    const LatticeNumeric fine = lattice_numeric(theory, lambda, n);
    o.summary["deformation"] = theory.deformation().source;
    o.summary["lambda"] = lambda.value();
    o.summary["L"] = theory.h_bounds().total_measure();
    o.summary["spacing_exact"] = fine.spacing_exact;
    o.summary["spacing_numeric"] = fine.spacing;
    o.summary["spacing_error"] = std::fabs(fine.spacing - fine.spacing_exact);
    o.summary["spacing_numeric_half_N"] = coarse.spacing;
    o.summary["order_ratio"] = order_or_null(std::fabs(coarse.spacing - coarse.spacing_exact),
                                             std::fabs(fine.spacing - fine.spacing_exact));
    o.summary["N"] = n;
    return o;
}

CommandOutput cmd_freefall(const RunConfig& c) {
    const GupTheory theory = make_theory(c, 5.0);
    const FreefallParams p = freefall_params(c);
    const int n = grid_size(c, 800);
    BumpSpec bump;
    bump.center = c.bump_center;
    bump.sigma = bump_half_width(c, 0.5);
    const PullbackResult pb = pullback_check(theory, p, bump, build_grid(theory, n, GridVariable::x_momentum));
    CommandOutput o;
    add_ode_rows(o, theory, p, n);
    o.summary["deformation"] = theory.deformation().source;
    o.summary["E"] = p.energy;
    o.summary["X"] = theory.cutoff();
    o.summary["F_re"] = pb.F.real();
    o.summary["F_im"] = pb.F.imag();
    o.summary["G_re"] = pb.G.real();
    o.summary["G_im"] = pb.G.imag();
    o.summary["abs_diff"] = pb.abs_diff;
    return o;
}

CommandOutput cmd_commutator(const RunConfig& c) {
    const GupTheory theory = make_theory(c, 20.0);
    const int n0 = grid_size(c, 400);
    std::vector<RepKind> reps;
    if (c.rep == "all") {
        reps = {RepKind::T, RepKind::K, RepKind::polymer};
    } else {
        reps = {parse_rep(c.rep)};
    }
    CommandOutput o;
    o.columns = {"rep", "residual_N", "residual_2N", "ratio", "touches_boundary"};
    const auto bc = BoundaryCondition::dirichlet();
    for (RepKind kind : reps) {
        double res[2] = {0.0, 0.0};
        bool touches = false;
        for (int j = 0; j < 2; ++j) {
            const int n = j == 0 ? n0 : 2 * n0;
            RepTriple rep;
            double half = 0.0;
            if (kind == RepKind::polymer) {
                const Grid z = build_grid(theory, n, GridVariable::z_polymer);
                half = bump_half_width(c, 0.5 * std::min(-z.nodes(0), z.nodes(n - 1)));
                rep = build_polymer(theory, z, bc);
            } else {
                const Grid x = build_grid(theory, n, GridVariable::x_momentum);
                half = bump_half_width(c, 0.5 * theory.cutoff());
                rep = kind == RepKind::T ? build_T(theory, x, bc) : build_K(theory, x, bc, parse_k_form(c.k_form));
            }
            const CommutatorResult r = commutator_residual(rep, theory, bump_vector(rep.grid.nodes, c.bump_center, half));
            res[j] = r.residual;
            touches = touches || r.touches_boundary;
        }
        o.rows.push_back({to_string(kind), res[0], res[1], order_or_null(res[0], res[1]), touches});
    }
    o.summary["deformation"] = theory.deformation().source;
    o.summary["N"] = n0;
    o.summary["X"] = theory.cutoff();
    return o;
}

// ---------------------------------------------------------------------------
// sweeps and rendering

struct Sweep {
    std::string name;
    std::vector<double> values;
};

Sweep parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    const auto c1 = text.find(':', eq == std::string::npos ? 0 : eq);
    const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
    if (eq == std::string::npos || c1 == std::string::npos || c2 == std::string::npos) {
        throw ValidationError("--sweep expects name=start:stop:count");
    }
    Sweep s;
    s.name = text.substr(0, eq);
    double start = 0.0;
    double stop = 0.0;
    int count = 0;
    try {
        start = std::stod(text.substr(eq + 1, c1 - eq - 1));
        stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        std::size_t used = 0;
        const std::string cs = text.substr(c2 + 1);
        count = std::stoi(cs, &used);
        if (used != cs.size()) throw std::invalid_argument("count");
    } catch (const std::exception&) {
        throw ValidationError("--sweep expects name=start:stop:count with numeric fields");
    }
    if (count < 1 || count > 10000) throw ValidationError("--sweep count must lie in [1, 10000]");
    for (int i = 0; i < count; ++i) {
        s.values.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
    }
    return s;
}

void apply_sweep_value(RunConfig& c, const std::string& name, double v) {
    if (name == "beta") {
        c.beta = v;
        c.f_source.clear();
    } else if (name == "hbar") {
        c.hbar = v;
    } else if (name == "m") {
        c.m = v;
    } else if (name == "omega") {
        c.omega = v;
    } else if (name == "g") {
        c.g_accel = v;
    } else if (name == "E") {
        c.energy = v;
    } else if (name == "lambda") {
        c.lambda = v;
    } else if (name == "X") {
        c.cutoff = v;
    } else if (name == "N") {
        c.N = static_cast<int>(std::lround(v));
    } else {
        throw ValidationError("cannot sweep '" + name + "'; use beta, hbar, m, omega, g, E, lambda, X or N");
    }
}

std::string csv_cell(const ojson& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return fmt::format("{:.10g}", v.get<double>());
    return v.dump();
}

void render_csv(std::ostream& os, const std::string& prefix_column, const std::vector<double>& prefix,
                const std::vector<CommandOutput>& runs) {
    if (!prefix_column.empty()) os << prefix_column << ',';
    for (std::size_t i = 0; i < runs.front().columns.size(); ++i) {
        os << (i ? "," : "") << runs.front().columns[i];
    }
    os << '\n';
    for (std::size_t r = 0; r < runs.size(); ++r) {
        for (const auto& row : runs[r].rows) {
            if (!prefix_column.empty()) os << fmt::format("{:.10g}", prefix[r]) << ',';
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
            os << '\n';
        }
    }
    for (std::size_t r = 0; r < runs.size(); ++r) {
        for (const auto& [k, v] : runs[r].summary.items()) {
            if (v.is_structured()) continue;
            os << "# ";
            if (!prefix_column.empty()) os << prefix_column << '=' << fmt::format("{:.10g}", prefix[r]) << ' ';
            os << k << ',' << csv_cell(v) << '\n';
        }
    }
}

ojson run_json(const CommandOutput& o) {
    ojson rows = ojson::array();
    for (const auto& row : o.rows) {
        ojson r = ojson::object();
        for (std::size_t i = 0; i < row.size(); ++i) r[o.columns[i]] = row[i];
        rows.push_back(std::move(r));
    }
    return ojson{{"rows", std::move(rows)}, {"summary", o.summary}, {"exit_code", o.exit_code}};
}

int worst_exit(const std::vector<CommandOutput>& runs) {
    int e = kExitOk;
    for (const auto& r : runs) e = std::max(e, r.exit_code);
    return e;
}

int exit_for_current_exception(std::ostream& err) {
    try {
        throw;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IndeterminateError& e) {
        err << "indeterminate: " << e.what() << '\n';
        return kExitIndeterminate;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

void add_common(CLI::App& app, RunConfig& c) {
    auto* f = app.add_option("--f", c.f_source, "deformation f(p), e.g. \"1+0.1*p^2\"");
    auto* b = app.add_option("--beta", c.beta, "shorthand for --f \"1+beta*p^2\"");
    f->excludes(b);
    b->excludes(f);
    app.add_option("--hbar", c.hbar, "reduced Planck constant")->capture_default_str();
    app.add_option("--X", c.cutoff, "momentum cutoff; grids live on [-X, X]");
    app.add_option("--quad-tol", c.quad_tol, "absolute quadrature tolerance")->capture_default_str();
    app.add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--out", c.out_path, "write results to this file instead of stdout");
    app.add_option("--sweep", c.sweep, "parameter sweep name=start:stop:count, run concurrently");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"Numerical realisation of one-dimensional GUP theories", "gupeq"};
    app.set_config("--config", "", "TOML or INI file with option defaults");
    app.require_subcommand(1);
    app.fallthrough();
    add_common(app, c);

    auto* analyze = app.add_subcommand("analyze", "deficiency indices, minimal length and polymer verdict");

    auto* spectrum = app.add_subcommand("spectrum", "oscillator spectrum or free-fall ODE residuals");
    spectrum->add_option("--system", c.system, "ho or freefall")
        ->required()
        ->check(CLI::IsMember({"ho", "freefall"}));
    spectrum->add_option("--n", c.levels, "number of levels to report")->capture_default_str();
    spectrum->add_option("--N", c.N, "grid nodes");
    spectrum->add_option("--rep", c.rep, "T, K or polymer")->check(CLI::IsMember({"T", "K", "polymer"}));
    spectrum->add_option("--k-form", c.k_form, "K position operator")
        ->check(CLI::IsMember({"similarity", "symmetrized"}));
    spectrum->add_option("--m", c.m, "mass");
    spectrum->add_option("--omega", c.omega, "oscillator frequency");
    spectrum->add_option("--g", c.g_accel, "gravitational acceleration");
    spectrum->add_option("--E", c.energy, "free-fall energy");

    auto* map_check = app.add_subcommand("map-check", "isometry of U and the T/K position operators");
    map_check->add_option("--N", c.N, "grid nodes (also run at 2N)");
    map_check->add_option("--bump-center", c.bump_center, "test vector centre");
    map_check->add_option("--bump-width", c.bump_width, "test vector half width");

    auto* lattice = app.add_subcommand("lattice", "position lattice of a self-adjoint extension");
    lattice->add_option("--lambda", c.lambda, "extension phase");
    lattice->add_option("--N", c.N, "u-grid nodes (also run at N/2)");
    lattice->add_option("--k-lo", c.k_lo, "first lattice index");
    lattice->add_option("--k-hi", c.k_hi, "last lattice index");

    auto* freefall = app.add_subcommand("freefall", "free-fall pullback functionals and ODE residual");
    freefall->add_option("--E", c.energy, "energy");
    freefall->add_option("--m", c.m, "mass");
    freefall->add_option("--g", c.g_accel, "gravitational acceleration");
    freefall->add_option("--N", c.N, "grid nodes");
    freefall->add_option("--bump-center", c.bump_center, "bump centre");
    freefall->add_option("--bump-width", c.bump_width, "bump sigma");

    auto* commutator = app.add_subcommand("commutator", "[q, p] - i hbar f(p) on bump vectors at N and 2N");
    commutator->add_option("--rep", c.rep, "T, K, polymer or all")
        ->check(CLI::IsMember({"T", "K", "polymer", "all"}));
    commutator->add_option("--k-form", c.k_form, "K position operator")
        ->check(CLI::IsMember({"similarity", "symmetrized"}));
    commutator->add_option("--N", c.N, "grid nodes");
    commutator->add_option("--bump-center", c.bump_center, "bump centre");
    commutator->add_option("--bump-width", c.bump_width, "bump half width");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    std::function<CommandOutput(const RunConfig&)> command;
    std::string name;
    if (analyze->parsed()) {
        command = cmd_analyze, name = "analyze";
    } else if (spectrum->parsed()) {
        command = cmd_spectrum, name = "spectrum";
    } else if (map_check->parsed()) {
        command = cmd_map_check, name = "map-check";
    } else if (lattice->parsed()) {
        command = cmd_lattice, name = "lattice";
    } else if (freefall->parsed()) {
        command = cmd_freefall, name = "freefall";
    } else {
        command = cmd_commutator, name = "commutator";
        if (c.rep == "T" && !commutator->count("--rep")) c.rep = "all";
    }

    try {
        std::vector<CommandOutput> runs;
        Sweep sweep;
        if (!c.sweep.empty()) {
            sweep = parse_sweep(c.sweep);
            std::vector<std::future<CommandOutput>> jobs;
            for (double v : sweep.values) {
                RunConfig rc = c;
                apply_sweep_value(rc, sweep.name, v);
                jobs.push_back(std::async(std::launch::async, command, rc));
            }
            for (auto& j : jobs) runs.push_back(j.get());
        } else {
            runs.push_back(command(c));
        }

        std::ostringstream text;
        if (c.format == "json") {
            ojson doc{{"schema_version", kSchemaVersion}, {"command", name}};
            if (sweep.name.empty()) {
                doc["result"] = run_json(runs.front());
            } else {
                doc["sweep"] = {{"name", sweep.name}, {"values", sweep.values}};
                ojson all = ojson::array();
                for (const auto& r : runs) all.push_back(run_json(r));
                doc["results"] = std::move(all);
            }
            text << doc.dump(2) << '\n';
        } else {
            render_csv(text, sweep.name, sweep.values, runs);
        }

        if (!c.out_path.empty()) {
            std::ofstream file(c.out_path);
            if (!file) throw ValidationError("cannot open --out file '" + c.out_path + "'");
            file << text.str();
        } else {
            out << text.str();
        }
        return worst_exit(runs);
    } catch (...) {
        return exit_for_current_exception(err);
    }
}

}  // namespace gupeq
