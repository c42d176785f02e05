// Standalone MILP solver speaking the LP-file / solution-file protocol:
//   swapnet-solve <model.lp> <out.sol> [--gap G] [--time-limit S]
//                 [--node-limit N] [--max-binaries N]
// Always writes a solution file (status reflects failures) and exits 0 on
// any solver verdict, 1 on usage or I/O errors.

#include <iostream>
#include <string>

#include "swapnet/solver.hpp"

int main(int argc, char** argv) {
  using namespace swapnet;
  if (argc < 3) {
    std::cerr << "usage: swapnet-solve <model.lp> <out.sol> [--gap G] [--time-limit S]"
                 " [--node-limit N] [--max-binaries N]\n";
    return 1;
  }
  std::string lp_path = argv[1];
  std::string sol_path = argv[2];
  SolveLimits limits;
  limits.mip_gap = 0.0;
  for (int i = 3; i + 1 < argc; i += 2) {
    std::string flag = argv[i];
    std::string value = argv[i + 1];
    try {
      if (flag == "--gap") limits.mip_gap = std::stod(value);
      else if (flag == "--time-limit") limits.time_limit_s = std::stod(value);
      else if (flag == "--node-limit") limits.node_limit = std::stol(value);
      else if (flag == "--max-binaries") limits.max_binaries = std::stoi(value);
      else {
        std::cerr << "unknown flag " << flag << "\n";
        return 1;
      }
    } catch (const std::exception&) {
      std::cerr << "bad value for " << flag << ": " << value << "\n";
      return 1;
    }
  }

  try {
    MilpModel model = import_lp(lp_path);
    Solution sol;
    try {
      sol = solve_exact(model, limits);
    } catch (const SizeError& e) {
      std::cerr << e.what() << "\n";
      sol.status = SolveStatus::error;
    }
    write_solution_file(sol, sol_path);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
