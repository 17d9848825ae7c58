#pragma once

// Invariant suite behind `qtrap verify`.

#include <string>
#include <vector>

namespace qtrap::verify {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string note;  // set when a check aborted with an error
  double seconds = 0.0;  // wall time, including any shared precomputation
};

struct VerifyOptions {
  int n_max = 100;
  // Drops the exp(i alpha xi s^2) factor in the projection route of the
  // b-coefficient check; that check must then fail.
  bool negative_control = false;
};

std::vector<CheckResult> run_all(const VerifyOptions& options = {});

}  // namespace qtrap::verify
