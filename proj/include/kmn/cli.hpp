#ifndef KMN_CLI_HPP
#define KMN_CLI_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kmn/poly3.hpp"
#include "kmn/solutions.hpp"

// Scenario files and the workflows behind the kmn-lab front end.
//
//   # comment
//   [travel]            or [travel.some-name]
//   m = 2
//   omega = 3/2
//
// One section per scenario; the part of the header before the first '.' is
// the workflow. Values are decimals, p/q rationals or, for a few keys, words.
namespace kmn::cli {

using symmetry::Rational;

enum class Workflow { Simulate, ExactResidual, SymmetryCheck, Reduce, Travel, Constraint };

const char* to_string(Workflow w);
/// ParseError (line 0) for an unknown name.
Workflow parse_workflow(std::string_view name);

struct Value {
  std::string text;
  double number = 0.0;
  /// Exact value for p/q and plain decimals that fit in 64-bit integers.
  std::optional<Rational> exact;
  bool word = false;
  /// 0 for defaults filled in after parsing.
  int line = 0;
};

class Scenario {
 public:
  std::string name;
  Workflow workflow = Workflow::Simulate;
  std::map<std::string, Value> values;
  /// Closed-form member selected by (m, n) and `solution`, where one applies.
  std::optional<solutions::SolutionKind> catalog;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  double number(const std::string& key) const;
  /// DomainError unless the value was given exactly.
  Rational rational(const std::string& key) const;
  /// Integer-valued keys; DomainError for a fractional value.
  long integer(const std::string& key) const;
  const std::string& word(const std::string& key) const;
};

/// Parses and validates. With several sections, `want` selects the one for
/// that workflow. Unknown keys, keys the workflow does not use, missing
/// required keys, malformed numbers and out-of-range values are ParseErrors
/// carrying the offending line (0 when the problem is a missing key).
Scenario parse_config(std::string_view text, std::optional<Workflow> want = std::nullopt);

/// One CSV value: %.17g, empty for a missing optional value.
std::string format_number(double v);

struct RunReport {
  std::vector<std::filesystem::path> files;
  /// key=value pairs printed on the summary line, in order.
  std::vector<std::pair<std::string, std::string>> summary;
};

/// Executes the scenario and writes its CSV files into `out_dir` (created if
/// needed). Library errors propagate unchanged.
RunReport run(const Scenario& s, const std::filesystem::path& out_dir);

}  // namespace kmn::cli

#endif  // KMN_CLI_HPP
