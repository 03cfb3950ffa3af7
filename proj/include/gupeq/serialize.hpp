#pragma once

#include <iosfwd>

#include <json.hpp>

#include "gupeq/selfadj.hpp"
#include "gupeq/spectra.hpp"

namespace gupeq {

/// Version of every JSON document the library and the CLI emit.
inline constexpr int kSchemaVersion = 1;

/// Finite numbers as numbers, infinities as "inf" / "-inf", NaN as null.
[[nodiscard]] nlohmann::json number_or_inf(double v);

[[nodiscard]] nlohmann::json to_json(const HLimit& h);
[[nodiscard]] nlohmann::json to_json(const DeficiencyReport& r);
/// Eigenvalues and residuals; eigenvectors only when asked for (re, im pairs).
[[nodiscard]] nlohmann::json to_json(const SpectrumResult& s, bool with_vectors = false);

/// index,eigenvalue,residual
void write_spectrum_csv(std::ostream& os, const SpectrumResult& s);

}  // namespace gupeq
