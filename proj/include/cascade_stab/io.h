#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cascade_stab/model.h"
#include "cascade_stab/simulator.h"
#include "cascade_stab/synthesis.h"
#include "cascade_stab/transform.h"

namespace cascade_stab {

using Json = nlohmann::json;

// Plant files: {m, D, Q, L, gamma1, gamma2, shapes: [{kind, params}]}.
// Shape kinds: indicator {a, b}, polynomial {coefficients},
// samples {grid, values}, cosine_series {terms: [[amplitude, frequency], ...]}.
Json shape_to_json(const ShapeFunction& shape);
ShapeFunction shape_from_json(const Json& j);

Json plant_to_json(const PlantSpec& spec);
PlantSpec plant_from_json(const Json& j);

/// Initial condition files: {components: [shape, ...]} with one entry per equation.
std::vector<ShapeFunction> initial_from_json(const Json& j);
Json initial_to_json(const std::vector<ShapeFunction>& components);

Json certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(const Json& j);

/// Gains file: {delta, N, N_min, sigma, sigma_bar, pole_offsets, K_Q, P, Kbar,
/// Bmat, Bmat_condition, K, certificate}.
Json gains_to_json(const Controller& controller, const DiffusionIndices& indices,
                   const std::optional<Certificate>& cert);
Controller controller_from_json(const Json& j);

Json family_to_json(const TransformFamily& family, const SpectralBasis& basis, int N);
Json basis_to_json(const SpectralBasis& basis);

Json read_json_file(const std::filesystem::path& path);

/// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// "%.17g" formatting, which round-trips every double.
std::string format_real(double value);

std::string modal_csv(const Trajectory& trajectory);
std::string field_csv(const Trajectory& trajectory, const std::vector<Eigen::MatrixXd>& fields,
                      const std::vector<double>& grid);
std::string norms_csv(const Trajectory& trajectory);

}  // namespace cascade_stab
