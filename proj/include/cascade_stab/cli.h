#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cascade_stab/model.h"
#include "cascade_stab/spectral.h"

namespace cascade_stab {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,
  kExitHypothesis = 2,
  kExitInternal = 3,
  kExitVerifyFailed = 4,
};

/// Runs the tool with the given arguments (argv[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// The first N plant shapes, padded when the plant has fewer with indicators of
/// width w = min(0.1, L/(N+2)) on [j w, (j+1) w].
std::vector<ShapeFunction> bench_shapes(const PlantSpec& spec, int N);

struct BenchRow {
  int N = 0;
  double t_modal = 0.0;
  double t_direct = 0.0;
  double ratio() const { return t_direct / t_modal; }
};

/// Median wall time, over `repeats` measurements, of the modal synthesis
/// (transform family, K_Q, modal gains, inversion of the input matrix) and of
/// the direct Riccati synthesis on the mN-dimensional modal system. Each
/// measurement loops until at least `min_seconds` have elapsed.
std::vector<BenchRow> run_bench(const PlantSpec& spec, double delta, const std::vector<int>& Ns,
                                int repeats = 5, double min_seconds = 0.02);

}  // namespace cascade_stab
