// Built-in invariant suites behind `sparsejt validate`.

#ifndef SPARSEJT_VALIDATE_HPP
#define SPARSEJT_VALIDATE_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace sparsejt {

enum class CheckOutcome { Pass, Fail, Info };

struct CheckReport {
  std::string module;
  std::string name;
  CheckOutcome outcome = CheckOutcome::Pass;
  std::string detail;
};

enum class ValidateLevel { Fast, Full };

std::vector<CheckReport> run_validation(ValidateLevel level);

// One line per check: "<PASS|FAIL|INFO> module.name detail". Returns true when nothing failed.
bool print_report(std::ostream& os, const std::vector<CheckReport>& reports);

}  // namespace sparsejt

#endif  // SPARSEJT_VALIDATE_HPP
