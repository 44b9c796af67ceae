#include "kmn/cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <set>

#include "kmn/constraints.hpp"
#include "kmn/errors.hpp"
#include "kmn/solver.hpp"
#include "kmn/stencil.hpp"
#include "kmn/symmetry.hpp"
#include "kmn/waves.hpp"

namespace kmn::cli {

using solutions::ClosedForm;
using solutions::SolutionKind;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- key tables

enum class Type { Real, Integer, Word };

struct Key {
  const char* name;
  Type type;
  bool required;
  const char* fallback;  // nullptr: optional without default
  std::vector<std::string> words = {};
};

const std::vector<std::string> kSolutionWords{"sine-shift22", "compacton22",    "parabola-cap32",
                                              "sn23",         "sine33",         "sin-squared-m1",
                                              "implicit-log13", "sech-n1"};

std::vector<Key> wave_keys(bool k_omega_required) {
  const char* unit = k_omega_required ? nullptr : "1";
  return {{"k", Type::Real, k_omega_required, unit},
          {"omega", Type::Real, k_omega_required, unit},
          {"C0", Type::Real, false, nullptr},
          {"C", Type::Real, false, nullptr},
          {"gamma", Type::Real, false, "0"},
          {"a", Type::Real, false, "0"},
          {"epsilon", Type::Integer, false, "1"},
          {"solution", Type::Word, false, nullptr, kSolutionWords}};
}

std::vector<Key> join(std::vector<Key> a, const std::vector<Key>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<Key> constraint_keys(const std::string& kind) {
  const Key kind_key{"kind", Type::Word, true, nullptr,
                     {"schrodinger", "first-integral", "transport", "separation"}};
  if (kind == "schrodinger")
    return {kind_key,
            {"m", Type::Real, true, nullptr},
            {"lambda", Type::Real, true, nullptr},
            {"C0", Type::Real, true, nullptr},
            {"phi0", Type::Real, true, nullptr},
            {"sign", Type::Integer, false, "1"},
            {"y_end", Type::Real, true, nullptr},
            {"samples", Type::Integer, false, "2001"}};
  if (kind == "first-integral")
    return {kind_key,
            {"m", Type::Real, true, nullptr},
            {"K", Type::Real, true, nullptr},
            {"w0", Type::Real, true, nullptr},
            {"sign", Type::Integer, false, "1"},
            {"x_end", Type::Real, true, nullptr},
            {"samples", Type::Integer, false, "2001"}};
  if (kind == "transport")
    return {kind_key,
            {"m", Type::Real, true, nullptr},
            {"K", Type::Real, true, nullptr},
            {"w_start", Type::Real, true, nullptr},
            {"direction", Type::Integer, false, "1"},
            {"t", Type::Real, true, nullptr},
            {"x0", Type::Real, true, nullptr},
            {"x1", Type::Real, true, nullptr},
            {"points", Type::Integer, false, "8"},
            {"scan", Type::Integer, false, "16"},
            {"hx", Type::Real, false, "0.02"},
            {"ht", Type::Real, false, "0.001"}};
  if (kind == "separation")
    return {kind_key,
            {"n", Type::Real, true, nullptr},
            {"lambda", Type::Real, true, nullptr},
            {"F0", Type::Real, true, nullptr},
            {"dF0", Type::Real, false, "0"},
            {"d2F0", Type::Real, false, "0"},
            {"c", Type::Real, true, nullptr},
            {"x0", Type::Real, false, "0"},
            {"x1", Type::Real, true, nullptr},
            {"t", Type::Real, false, "0"},
            {"samples", Type::Integer, false, "2001"}};
  return {kind_key};
}

std::vector<Key> workflow_keys(Workflow w, const std::string& kind) {
  const std::vector<Key> equation{{"m", Type::Real, true, nullptr}, {"n", Type::Real, true, nullptr}};
  const std::vector<Key> sampling{{"points", Type::Integer, false, "200"},
                                  {"seed", Type::Integer, false, "1"}};
  switch (w) {
    case Workflow::Simulate:
      return join(join(equation, wave_keys(false)),
                  {{"kappa", Type::Real, false, "1"},
                   {"delta", Type::Real, false, "1"},
                   {"lambda", Type::Real, false, "0"},
                   {"initial", Type::Word, false, "exact", {"zero", "sine", "exact"}},
                   {"amplitude", Type::Real, false, "1"},
                   {"offset", Type::Real, false, "0"},
                   {"mode", Type::Integer, false, "1"},
                   {"length", Type::Real, true, nullptr},
                   {"npoints", Type::Integer, true, nullptr},
                   {"x0", Type::Real, false, nullptr},
                   {"t_end", Type::Real, true, nullptr},
                   {"dt", Type::Real, false, nullptr},
                   {"cfl", Type::Real, false, "0.1"},
                   {"order", Type::Integer, false, "4"},
                   {"record_every", Type::Integer, false, "1"}});
    case Workflow::ExactResidual:
      return join(join(equation, wave_keys(false)),
                  join(sampling, {{"lambda", Type::Real, false, "0"}}));
    case Workflow::SymmetryCheck:
      return join(join({{"m", Type::Real, true, nullptr}, {"n", Type::Real, false, "1"}},
                       wave_keys(false)),
                  {{"lambda", Type::Real, false, "0"},
                   {"transform_epsilon", Type::Real, false, "3/10"},
                   {"points", Type::Integer, false, "50"},
                   {"seed", Type::Integer, false, "1"}});
    case Workflow::Reduce:
      return {{"m", Type::Real, true, nullptr},
              {"chi0", Type::Real, false, "0"},
              {"chi1", Type::Real, true, nullptr},
              {"v0", Type::Real, true, nullptr},
              {"dv0", Type::Real, false, "0"},
              {"d2v0", Type::Real, false, "0"},
              {"samples", Type::Integer, false, "4001"},
              {"rtol", Type::Real, false, "1e-10"},
              {"atol", Type::Real, false, "1e-10"},
              {"t", Type::Real, false, "1"},
              {"window", Type::Real, false, "0.6"},
              {"npoints", Type::Integer, false, "2048"},
              {"stride", Type::Integer, false, "1"}};
    case Workflow::Travel:
      return join(join(equation, wave_keys(true)),
                  join(sampling, {{"g0", Type::Real, false, nullptr},
                                  {"direction", Type::Integer, false, "1"},
                                  {"extent", Type::Real, false, "100"},
                                  {"samples", Type::Integer, false, "401"},
                                  {"h", Type::Real, false, "0.05"}}));
    case Workflow::Constraint:
      return constraint_keys(kind);
  }
  return {};
}

std::set<std::string> all_key_names() {
  std::set<std::string> names;
  for (Workflow w : {Workflow::Simulate, Workflow::ExactResidual, Workflow::SymmetryCheck,
                     Workflow::Reduce, Workflow::Travel})
    for (const auto& k : workflow_keys(w, "")) names.insert(k.name);
  for (const char* kind : {"schrodinger", "first-integral", "transport", "separation"})
    for (const auto& k : constraint_keys(kind)) names.insert(k.name);
  return names;
}

// ------------------------------------------------------------------- numbers

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<long long> parse_integer(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// Exact value of a plain decimal such as -12.5e-3, if it fits.
std::optional<Rational> exact_decimal(std::string_view s) {
  std::size_t i = 0;
  bool negative = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) negative = s[i++] == '-';
  long long digits = 0;
  int scale = 0, count = 0;
  bool seen_point = false, any = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      if (++count > 18) return std::nullopt;
      digits = digits * 10 + (c - '0');
      if (seen_point) ++scale;
      any = true;
    } else {
      break;
    }
  }
  if (!any) return std::nullopt;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') return std::nullopt;
    const auto e = parse_integer(s.substr(i + 1));
    if (!e) return std::nullopt;
    scale -= static_cast<int>(*e);
  }
  long long pow10 = 1;
  for (int k = 0; k < std::abs(scale); ++k) {
    if (pow10 > std::numeric_limits<long long>::max() / 10) return std::nullopt;
    pow10 *= 10;
  }
  if (scale < 0 && digits > std::numeric_limits<long long>::max() / pow10) return std::nullopt;
  const Rational r = scale >= 0 ? Rational(digits, pow10) : Rational(digits * pow10);
  return negative ? -r : r;
}

Value parse_value(const std::string& text, int line) {
  Value v;
  v.text = text;
  v.line = line;
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const auto p = parse_integer(trim(text.substr(0, slash)));
    const auto q = parse_integer(trim(text.substr(slash + 1)));
    if (!p || !q) throw ParseError(line, "malformed rational '" + text + "'");
    if (*q == 0) throw ParseError(line, "zero denominator in '" + text + "'");
    v.exact = Rational(*p, *q);
    v.number = static_cast<double>(*p) / static_cast<double>(*q);
    return v;
  }
  const char* b = text.data();
  const char* e = b + text.size();
  if (b != e && *b == '+') ++b;
  const auto [p, ec] = std::from_chars(b, e, v.number);
  if (ec != std::errc{} || p != e || text.empty() || !std::isfinite(v.number))
    throw ParseError(line, "non-numeric value '" + text + "'");
  v.exact = exact_decimal(text);
  return v;
}

// ------------------------------------------------------------------- catalog

SolutionKind kind_from_word(const std::string& w) {
  static const std::map<std::string, SolutionKind> table{
      {"sine-shift22", SolutionKind::SineShift22}, {"compacton22", SolutionKind::Compacton22},
      {"parabola-cap32", SolutionKind::ParabolaCap32}, {"sn23", SolutionKind::Sn23},
      {"sine33", SolutionKind::Sine33}, {"sin-squared-m1", SolutionKind::SinSquaredM1},
      {"implicit-log13", SolutionKind::ImplicitLog13}, {"sech-n1", SolutionKind::SechN1}};
  return table.at(w);
}

bool solves(SolutionKind k, double m, double n) {
  switch (k) {
    case SolutionKind::SineShift22:
    case SolutionKind::Compacton22: return m == 2.0 && n == 2.0;
    case SolutionKind::ParabolaCap32: return m == 2.0 && n == 3.0;
    case SolutionKind::Sn23: return m == 3.0 && n == 2.0;
    case SolutionKind::Sine33: return m == 3.0 && n == 3.0;
    case SolutionKind::SinSquaredM1: return m == 1.0 && n == 1.0;
    case SolutionKind::ImplicitLog13: return m == 3.0 && n == 1.0;
    case SolutionKind::SechN1: return m > 1.0 && n == 1.0;
  }
  return false;
}

std::optional<SolutionKind> default_kind(double m, double n, Workflow w) {
  if (m == 2.0 && n == 2.0)
    return w == Workflow::SymmetryCheck ? SolutionKind::SineShift22 : SolutionKind::Compacton22;
  if (m == 2.0 && n == 3.0) return SolutionKind::ParabolaCap32;
  if (m == 3.0 && n == 2.0) return SolutionKind::Sn23;
  if (m == 3.0 && n == 3.0) return SolutionKind::Sine33;
  if (m == 1.0 && n == 1.0) return SolutionKind::SinSquaredM1;
  if (m > 1.0 && n == 1.0) return SolutionKind::SechN1;
  return std::nullopt;
}

std::string kind_word(SolutionKind k) {
  for (const auto& w : kSolutionWords)
    if (kind_from_word(w) == k) return w;
  return solutions::to_string(k);
}

TravelingWaveParams wave_of(const Scenario& s) {
  TravelingWaveParams w;
  w.k = s.number("k");
  w.omega = s.number("omega");
  w.c = s.has("C0") ? s.number("C0") : s.has("C") ? s.number("C") : 0.0;
  w.gamma = s.number("gamma");
  w.a = s.number("a");
  w.epsilon = static_cast<int>(s.integer("epsilon"));
  return w;
}

ClosedForm closed_form(const Scenario& s) {
  if (!s.catalog) throw DomainError("no closed-form solution is known for these exponents");
  const auto w = wave_of(s);
  switch (*s.catalog) {
    case SolutionKind::SineShift22: return ClosedForm::sine_shift22(w);
    case SolutionKind::Compacton22: return ClosedForm::compacton22(w);
    case SolutionKind::ParabolaCap32: return ClosedForm::parabola_cap32(w);
    case SolutionKind::Sn23: return ClosedForm::sn23(w);
    case SolutionKind::Sine33: return ClosedForm::sine33(w);
    case SolutionKind::ImplicitLog13: return ClosedForm::implicit_log13(w);
    case SolutionKind::SechN1: return ClosedForm::sech_n1(s.number("m"), w);
    case SolutionKind::SinSquaredM1:
      return ClosedForm::sin_squared_m1(
          {s.has("C0") ? s.number("C0") : 1.0, s.number("lambda"), s.number("a")});
  }
  throw DomainError("unknown solution kind");
}

// ------------------------------------------------------------------- parsing

struct Section {
  std::string name;
  Workflow workflow;
  int line;
  std::vector<std::pair<std::string, Value>> entries;
};

void check_range(const Scenario& s) {
  auto fail = [&](const std::string& key, const std::string& why) {
    throw ParseError(s.values.at(key).line, key + " " + why);
  };
  auto positive = [&](const char* key) {
    if (s.has(key) && !(s.number(key) > 0.0)) fail(key, "must be positive");
  };
  auto at_least = [&](const char* key, long lo) {
    if (s.has(key) && s.integer(key) < lo) fail(key, "must be at least " + std::to_string(lo));
  };
  for (const char* key : {"epsilon", "direction", "sign"})
    if (s.has(key) && std::abs(s.integer(key)) != 1) fail(key, "must be +1 or -1");
  for (const char* key : {"length", "t_end", "dt", "cfl", "samples", "rtol", "atol", "extent", "h",
                          "hx", "ht", "window", "transform_epsilon"})
    positive(key);
  if (s.has("window") && s.number("window") >= 1.0) fail("window", "must be below 1");
  if (s.has("k") && s.number("k") == 0.0) fail("k", "must be nonzero");
  at_least("npoints", 8);
  at_least("points", 1);
  at_least("samples", 2);
  at_least("record_every", 1);
  at_least("stride", 1);
  at_least("scan", 1);
  at_least("mode", 1);
  at_least("seed", 0);
  if (s.has("order") && s.integer("order") != 2 && s.integer("order") != 4)
    fail("order", "must be 2 or 4");
  if (s.has("C0") && s.has("C")) fail("C", "conflicts with C0");
  if (s.has("n") && s.has("C") && s.number("n") == 1.0) fail("C", "is the n != 1 constant; use C0");
  if (s.has("n") && s.has("C0") && s.number("n") != 1.0 && s.workflow != Workflow::Constraint)
    fail("C0", "is the n = 1 constant; use C");
  if (s.workflow == Workflow::Reduce && s.number("t") <= 0.0) fail("t", "must be positive");
}

void select_catalog(Scenario& s) {
  const bool wanted = s.workflow == Workflow::ExactResidual || s.workflow == Workflow::Travel ||
                      s.workflow == Workflow::SymmetryCheck ||
                      (s.workflow == Workflow::Simulate && s.word("initial") == "exact");
  if (!wanted) return;
  const double m = s.number("m"), n = s.number("n");
  if (s.has("solution")) {
    const auto k = kind_from_word(s.word("solution"));
    if (!solves(k, m, n))
      throw ParseError(s.values.at("solution").line,
                       "solution " + s.word("solution") + " does not solve the equation with these m, n");
    s.catalog = k;
    return;
  }
  s.catalog = default_kind(m, n, s.workflow);
  const bool needed = s.workflow == Workflow::ExactResidual ||
                      (s.workflow == Workflow::Simulate && s.word("initial") == "exact");
  if (!s.catalog && needed)
    throw ParseError(s.values.at("m").line,
                     "no closed-form solution for m = " + s.values.at("m").text +
                         ", n = " + s.values.at("n").text + " (workflow " + to_string(s.workflow) + ")");
}

Scenario build(const Section& sec) {
  Scenario s;
  s.name = sec.name;
  s.workflow = sec.workflow;
  std::string kind;
  if (sec.workflow == Workflow::Constraint) {
    for (const auto& [k, v] : sec.entries)
      if (k == "kind") kind = v.text;
  }
  const auto keys = workflow_keys(sec.workflow, kind);
  static const auto known = all_key_names();
  for (const auto& [name, raw] : sec.entries) {
    const auto it = std::find_if(keys.begin(), keys.end(), [&](const Key& k) { return name == k.name; });
    if (it == keys.end()) {
      if (!known.count(name)) throw ParseError(raw.line, "unknown key '" + name + "'");
      const std::string scope = sec.workflow == Workflow::Constraint && !kind.empty()
                                    ? "constraint kind " + kind
                                    : std::string("workflow ") + to_string(sec.workflow);
      throw ParseError(raw.line, "key '" + name + "' is not used by " + scope);
    }
    Value v;
    if (it->type == Type::Word) {
      if (std::find(it->words.begin(), it->words.end(), raw.text) == it->words.end()) {
        std::string list;
        for (const auto& w : it->words) list += (list.empty() ? "" : ", ") + w;
        throw ParseError(raw.line, name + " must be one of: " + list);
      }
      v = raw;
      v.word = true;
    } else {
      v = parse_value(raw.text, raw.line);
      if (it->type == Type::Integer && (v.number != std::floor(v.number) || std::abs(v.number) > 1e15))
        throw ParseError(raw.line, name + " must be an integer");
    }
    s.values[name] = v;
  }
  for (const auto& k : keys) {
    if (s.has(k.name)) continue;
    if (k.required)
      throw ParseError(0, "missing required key '" + std::string(k.name) + "' for " +
                              (sec.workflow == Workflow::Constraint && !kind.empty()
                                   ? "constraint kind " + kind
                                   : std::string("workflow ") + to_string(sec.workflow)));
    if (!k.fallback) continue;
    Value v = k.type == Type::Word ? Value{k.fallback, 0.0, std::nullopt, true, 0}
                                   : parse_value(k.fallback, 0);
    v.line = 0;
    s.values[k.name] = v;
  }
  check_range(s);
  select_catalog(s);
  if (s.workflow == Workflow::Travel && !s.has("g0") && !s.catalog)
    throw ParseError(0, "missing required key 'g0' for workflow travel (no closed-form member to start from)");
  return s;
}

// ------------------------------------------------------------------- output

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
    if (!out_) throw Error("io", "cannot write " + path.string());
    write(header);
  }
  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_number(v));
    write(cells);
  }
  void write(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

std::string str(const Rational& r) {
  return r.denominator() == 1 ? std::to_string(r.numerator())
                              : std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Uniform doubles from the top 53 bits, identical on every platform.
class Uniform {
 public:
  explicit Uniform(long seed) : rng_(static_cast<std::uint64_t>(seed)) {}
  double operator()(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1p-53;
  }

 private:
  std::mt19937_64 rng_;
};

using Points = std::vector<std::pair<double, double>>;

// Random (x, t) where the closed form is defined and smooth.
Points admissible_points(const ClosedForm& s, long count, long seed) {
  Uniform u(seed);
  Points pts;
  if (!s.traveling()) {
    for (long i = 0; i < count; ++i) {
      const double x = u(-5.0, 5.0);
      pts.emplace_back(x, u(-1.0, 1.0));
    }
    return pts;
  }
  const auto& w = s.wave();
  double lo = -6.0, hi = 6.0;
  if (s.kind() == SolutionKind::Compacton22) {
    lo = -1.95 * M_PI * std::abs(w.k);
    hi = -lo;
  }
  const bool implicit = s.kind() == SolutionKind::ImplicitLog13;
  if (implicit) {
    // Drawn in epsilon*y - a, above the minimum of the implicit left side.
    const double A = w.omega / (w.k * w.k * w.k);
    lo = solutions::implicit_log_lhs(std::sqrt(2.0 * w.k * w.k * A), w) + 1e-3;
    hi = lo + 8.0;
  }
  for (long i = 0; i < count; ++i) {
    const double phase = u(lo, hi);
    const double t = u(-1.0, 1.0);
    const double y = implicit ? (phase + w.a) / w.epsilon : (phase - w.a) / w.epsilon;
    pts.emplace_back((y + w.omega * t) / w.k, t);
  }
  return pts;
}

void add(RunReport& r, const std::string& key, const std::string& value) { r.summary.emplace_back(key, value); }
void add(RunReport& r, const std::string& key, double value) { add(r, key, format_number(value)); }

// Writes residuals.csv (point, x, t, value, max) and returns the maximum.
double write_residuals(RunReport& report, const fs::path& dir, const std::vector<std::array<double, 3>>& rows) {
  const auto path = dir / "residuals.csv";
  Csv csv(path, {"point", "x", "t", "value", "max"});
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    worst = std::max(worst, rows[i][2]);
    csv.row({static_cast<double>(i), rows[i][0], rows[i][1], rows[i][2], worst});
  }
  report.files.push_back(path);
  add(report, "max_residual", worst);
  return worst;
}

// ----------------------------------------------------------------- workflows

void write_trajectory(RunReport& report, const fs::path& dir, const solver::Trajectory& tr) {
  Csv traj(dir / "trajectory.csv", {"t", "x", "u"});
  for (const auto& f : tr.snapshots)
    for (std::size_t i = 0; i < f.size(); ++i) traj.row({f.time(), f.grid().node(i), f[i]});
  Csv cons(dir / "conserved.csv", {"t", "mass", "l2", "energy"});
  for (std::size_t j = 0; j < tr.conserved.size(); ++j) {
    const auto& q = tr.conserved[j];
    cons.write({format_number(tr.snapshots[j].time()), format_number(q.mass), format_number(q.l2),
                q.energy ? format_number(*q.energy) : ""});
  }
  report.files.push_back(dir / "trajectory.csv");
  report.files.push_back(dir / "conserved.csv");
}

RunReport run_simulate(const Scenario& s, const fs::path& dir) {
  const KmnParams p{s.number("m"), s.number("n"), s.number("kappa"), s.number("delta")};
  validate(p);
  const double length = s.number("length");
  const double x0 = s.has("x0") ? s.number("x0") : -0.5 * length;
  const auto grid = Grid1D::periodic(x0, length, static_cast<std::size_t>(s.integer("npoints")));
  const std::string& initial = s.word("initial");

  std::optional<ClosedForm> exact;
  Field u0(grid, std::vector<double>(grid.size(), 0.0));
  if (initial == "sine") {
    const double amp = s.number("amplitude"), off = s.number("offset");
    const double xi = 2.0 * M_PI * static_cast<double>(s.integer("mode")) / length;
    u0 = Field::sample(grid, [&](double x) { return off + amp * std::sin(xi * (x - x0)); });
  } else if (initial == "exact") {
    exact = closed_form(s);
    u0 = Field::sample(grid, [&](double x) { return exact->eval(x, 0.0); });
  }

  solver::SolverConfig cfg;
  if (s.has("dt")) cfg.dt = s.number("dt");
  cfg.t_end = s.number("t_end");
  cfg.record_every = static_cast<int>(s.integer("record_every"));
  cfg.derivative_order = static_cast<int>(s.integer("order"));
  cfg.cfl_limit = s.number("cfl");

  RunReport report;
  solver::Trajectory tr;
  try {
    tr = solver::simulate(u0, p, cfg);
  } catch (const solver::SimulationBlowUp& e) {
    write_trajectory(report, dir, e.partial());
    Csv last(dir / "last_finite.csv", {"t", "x", "u"});
    const auto& f = e.last_finite();
    for (std::size_t i = 0; i < f.size(); ++i) last.row({f.time(), f.grid().node(i), f[i]});
    throw;
  }
  write_trajectory(report, dir, tr);

  const auto& first = tr.conserved.front();
  const auto& last = tr.conserved.back();
  // Mass is measured against a bound on the L1 norm so that zero-mean data
  // do not divide by round-off.
  const double span = tr.snapshots.front().grid().length();
  const double mass_scale = std::max(std::abs(first.mass), std::sqrt(span * first.l2));
  auto drift = [](double a, double b, double scale) { return scale != 0.0 ? std::abs(b - a) / scale : std::abs(b - a); };
  add(report, "steps", std::to_string(tr.steps));
  add(report, "snapshots", std::to_string(tr.snapshots.size()));
  add(report, "mass_drift", drift(first.mass, last.mass, mass_scale));
  add(report, "l2_drift", drift(first.l2, last.l2, std::abs(first.l2)));
  if (exact) {
    const auto& f = tr.snapshots.back();
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      err = std::max(err, std::abs(f[i] - exact->eval(f.grid().node(i), f.time())));
    add(report, "solution", kind_word(exact->kind()));
    add(report, "error_vs_exact", err);
  }
  return report;
}

RunReport run_exact_residual(const Scenario& s, const fs::path& dir) {
  const auto form = closed_form(s);
  const auto pts = admissible_points(form, s.integer("points"), s.integer("seed"));
  std::vector<std::array<double, 3>> rows;
  for (const auto& pt : pts) rows.push_back({pt.first, pt.second, solutions::residual(form, {pt})});
  RunReport report;
  add(report, "solution", kind_word(form.kind()));
  write_residuals(report, dir, rows);
  return report;
}

RunReport run_symmetry_check(const Scenario& s, const fs::path& dir) {
  const Rational m = s.rational("m");
  const Rational n = s.rational("n");
  const auto algebra = symmetry::table1_fields(m, n);
  const auto& fields = algebra.fields;
  const auto closure = symmetry::closure_check(fields);
  if (!closure.closed) {
    const auto& w = *closure.witness;
    throw Error("not-closed", "bracket of fields " + std::to_string(w.a) + " and " + std::to_string(w.b) +
                                  " leaves the span: " + w.bracket.str());
  }

  RunReport report;
  const std::size_t d = fields.size();
  std::vector<std::string> header{"a", "b"};
  for (std::size_t k = 0; k < d; ++k) header.push_back("c" + std::to_string(k));
  Csv brackets(dir / "brackets.csv", header);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      std::vector<std::string> row{std::to_string(a), std::to_string(b)};
      for (std::size_t k = 0; k < d; ++k) row.push_back(str(closure.constants[a][b][k]));
      brackets.write(row);
    }
  report.files.push_back(dir / "brackets.csv");

  std::size_t antisym = 0, jacobi = 0;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      if (!(symmetry::lie_bracket(fields[a], fields[b]) + symmetry::lie_bracket(fields[b], fields[a])).is_zero())
        ++antisym;
      for (std::size_t c = 0; c < d; ++c)
        if (!symmetry::jacobi_defect(fields[a], fields[b], fields[c]).is_zero()) ++jacobi;
    }
  add(report, "generators", std::to_string(d));
  add(report, "complete", algebra.complete ? "true" : "false");
  add(report, "antisymmetry_defects", std::to_string(antisym));
  add(report, "jacobi_defects", std::to_string(jacobi));

  Csv transforms(dir / "transform_residuals.csv", {"generator", "epsilon", "max_residual"});
  report.files.push_back(dir / "transform_residuals.csv");
  if (!s.catalog) {
    add(report, "solution", "none");
    return report;
  }
  const auto form = closed_form(s);
  add(report, "solution", kind_word(form.kind()));
  const KmnParams eq = form.equation();
  const symmetry::SolutionFn base = [form](double x, double t) { return form.eval_derivs(x, t); };
  Uniform u(s.integer("seed"));
  Points pts;
  const bool compacton = form.kind() == SolutionKind::Compacton22;
  for (long i = 0; i < s.integer("points"); ++i) {
    const double x = compacton ? u(-1.0, 1.0) : u(-3.0, 3.0);
    pts.emplace_back(x, u(-0.5, 0.5));
  }
  const double e = s.number("transform_epsilon");
  double worst = 0.0;
  for (int g = 0; g < symmetry::generator_count(algebra.kind); ++g) {
    for (double eps : {-e, e}) {
      const auto f = symmetry::apply_transform({algebra.kind, g, eps, s.number("m")}, base);
      double r = 0.0;
      for (const auto& [x, t] : pts) r = std::max(r, std::abs(pointwise_residual(f(x, t), eq)));
      transforms.row({static_cast<double>(g), eps, r});
      worst = std::max(worst, r);
    }
  }
  add(report, "max_residual", worst);
  return report;
}

RunReport run_reduce(const Scenario& s, const fs::path& dir) {
  const double m = s.number("m");
  symmetry::ReductionOptions opt;
  opt.rtol = s.number("rtol");
  opt.atol = s.number("atol");
  opt.samples = static_cast<std::size_t>(s.integer("samples"));
  const auto v = symmetry::similarity_reduce(m, {s.number("v0"), s.number("dv0"), s.number("d2v0")},
                                             s.number("chi0"), s.number("chi1"), opt);
  RunReport report;
  {
    Csv csv(dir / "profile.csv", {"chi", "v", "dv", "d2v", "d3v"});
    for (std::size_t i = 0; i < v.chi.size(); ++i) csv.row({v.chi[i], v.v[i], v.dv[i], v.d2v[i], v.d3v[i]});
    report.files.push_back(dir / "profile.csv");
  }

  // The lifted field lives on x = t^{1/3} chi; keep a centred fraction of
  // that window so every difference stencil stays inside the samples.
  const double t = s.number("t");
  const double scale = std::cbrt(t);
  const double span = scale * (v.hi() - v.lo());
  const double width = s.number("window") * span;
  const auto npoints = static_cast<std::size_t>(s.integer("npoints"));
  const Grid1D grid(scale * 0.5 * (v.lo() + v.hi()) - 0.5 * width, width / static_cast<double>(npoints), npoints);
  const Field u = symmetry::lift(v, t, grid);
  {
    Csv csv(dir / "lifted.csv", {"x", "u"});
    for (std::size_t i = 0; i < u.size(); ++i) csv.row({grid.node(i), u[i]});
    report.files.push_back(dir / "lifted.csv");
  }
  const KmnParams eq{m, 1.0, 1.0, 1.0};
  const SpaceTimeFunction fn = [&](double x, double tt) { return symmetry::lift_value(v, x, tt); };
  const double ht = 1e-3 * t;
  std::vector<std::array<double, 3>> rows;
  const auto stride = static_cast<std::size_t>(s.integer("stride"));
  for (std::size_t i = 0; i < grid.size(); i += stride)
    rows.push_back({grid.node(i), t, std::abs(fd_residual(fn, grid.node(i), t, grid.dx(), ht, eq))});
  write_residuals(report, dir, rows);
  return report;
}

// Three quarters of the way up the closed-form profile at t = 0: strictly
// between the turning points for every periodic catalog member.
double default_start(const ClosedForm& form) {
  const auto& w = form.wave();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i <= 4000; ++i) {
    const double psi = -20.0 + 0.01 * i;
    try {
      const double g = form.eval(((psi - w.a) / w.epsilon) / w.k, 0.0);
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    } catch (const Error&) {
    }
  }
  if (!(hi >= lo)) throw DomainError("cannot choose g0 from the closed-form profile; set g0");
  return 0.25 * lo + 0.75 * hi;
}

RunReport run_travel(const Scenario& s, const fs::path& dir) {
  waves::FirstIntegral fi;
  fi.equation = {s.number("m"), s.number("n"), 1.0, 1.0};
  fi.kind = fi.equation.n == 1.0 ? waves::IntegralCase::UnitDispersion : waves::IntegralCase::General;
  fi.wave = wave_of(s);
  const auto f = waves::integrand(fi);
  const double g0 = s.has("g0") ? s.number("g0") : default_start(closed_form(s));
  const auto tp = waves::find_turning_points(f.rhs, g0, s.number("extent"));
  if (!tp.below || !tp.above)
    throw DomainError("the orbit through g0 is not closed within the search extent");
  const waves::PeriodicOrbit orbit(f, *tp.below, *tp.above, g0, static_cast<int>(s.integer("direction")));

  RunReport report;
  if (s.catalog) add(report, "solution", kind_word(*s.catalog));
  add(report, "g0", g0);
  add(report, "lo", orbit.lo());
  add(report, "hi", orbit.hi());
  add(report, "period", orbit.period());
  {
    Csv csv(dir / "profile.csv", {"phase", "g"});
    const auto samples = s.integer("samples");
    for (long j = 0; j < samples; ++j) {
      const double phase = orbit.period() * static_cast<double>(j) / static_cast<double>(samples - 1);
      csv.row({phase, orbit.eval(phase)});
    }
    report.files.push_back(dir / "profile.csv");
  }

  const auto& w = fi.wave;
  const SpaceTimeFunction u = [&](double x, double t) {
    return orbit.eval(w.epsilon * (w.k * x - w.omega * t) + w.a);
  };
  const double h = s.number("h");
  const double hx = h / std::abs(w.k);
  const double ht = w.omega != 0.0 ? h / std::abs(w.omega) : h;
  Uniform rnd(s.integer("seed"));
  std::vector<std::array<double, 3>> rows;
  for (long i = 0; i < s.integer("points"); ++i) {
    const double phase = rnd(0.0, orbit.period());
    const double t = rnd(-1.0, 1.0);
    const double x = ((phase - w.a) / w.epsilon + w.omega * t) / w.k;
    rows.push_back({x, t, std::abs(fd_residual(u, x, t, hx, ht, fi.equation))});
  }
  write_residuals(report, dir, rows);
  return report;
}

RunReport run_constraint(const Scenario& s, const fs::path& dir) {
  namespace c = constraints;
  RunReport report;
  const std::string& kind = s.word("kind");
  add(report, "kind", kind);
  std::vector<std::array<double, 3>> rows;

  if (kind == "schrodinger") {
    const double m = s.number("m"), lambda = s.number("lambda"), C0 = s.number("C0");
    const double phi0 = s.number("phi0");
    const double slope = static_cast<double>(s.integer("sign")) *
                         std::sqrt(std::max(c::phi_first_integral(phi0, m, lambda, C0), 0.0));
    const auto orbit = c::phi_orbit(m, lambda, C0, {phi0, slope}, s.number("y_end"),
                                    static_cast<std::size_t>(s.integer("samples")));
    Csv csv(dir / "profile.csv", {"y", "ode", "quadrature"});
    for (std::size_t i = 0; i < orbit.y.size(); ++i) {
      csv.row({orbit.y[i], orbit.ode[i], orbit.quadrature[i]});
      rows.push_back({orbit.y[i], 0.0, std::abs(orbit.ode[i] - orbit.quadrature[i])});
    }
    report.files.push_back(dir / "profile.csv");
  } else if (kind == "first-integral") {
    const double m = s.number("m"), K = s.number("K");
    const auto orbit = c::first_integral_orbit(m, K, s.number("w0"), static_cast<int>(s.integer("sign")),
                                               s.number("x_end"), static_cast<std::size_t>(s.integer("samples")));
    Csv csv(dir / "orbit.csv", {"x", "w", "wx"});
    for (std::size_t i = 0; i < orbit.x.size(); ++i) {
      csv.row({orbit.x[i], orbit.w[i], orbit.wx[i]});
      rows.push_back({orbit.x[i], 0.0,
                      std::abs(orbit.wx[i] * orbit.wx[i] - c::first_integral_rhs(orbit.w[i], m, K))});
    }
    report.files.push_back(dir / "orbit.csv");
    const c::Samples w{orbit.x.front(), orbit.x[1] - orbit.x[0], orbit.w};
    add(report, "reciprocal_constraint", c::reciprocal_constraint_residual(w, m));
  } else if (kind == "transport") {
    const double m = s.number("m"), K = s.number("K");
    const auto w0 = c::quadrature_profile(m, K, s.number("w_start"), static_cast<int>(s.integer("direction")));
    const c::CharacteristicsProblem p{[&](double x) { return w0.eval(x); }, w0.lo(), w0.hi(), m, K};
    const auto scan = static_cast<std::size_t>(s.integer("scan"));
    const SpaceTimeFunction w = [&](double x, double t) { return c::characteristics_solve(p, x, t, scan); };
    const double t = s.number("t"), x0 = s.number("x0"), x1 = s.number("x1");
    const double hx = s.number("hx"), ht = s.number("ht");
    const long count = s.integer("points");
    Csv csv(dir / "pipeline.csv", {"x", "t", "w", "transport", "res_w", "res_recip", "res_constraint"});
    for (long i = 0; i < count; ++i) {
      const double x = count == 1 ? x0 : x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(count - 1);
      const double wv = w(x, t);
      const double wx = fd::derivative_of([&](double y) { return w(y, t); }, x, 1e-3, 1, 6);
      const double wt = fd::derivative_of([&](double y) { return w(x, y); }, t, 1e-3, 1, 6);
      const double transport = std::abs(c::transport_speed(wv, m, K) * wx + wt);
      const auto r = c::reciprocal_pair_check(w, m, 1.0, {{x, t}}, hx, ht);
      csv.row({x, t, wv, transport, r.res_w, r.res_recip, r.res_constraint});
      rows.push_back({x, t, std::max({transport, r.res_w, r.res_recip, r.res_constraint})});
    }
    report.files.push_back(dir / "pipeline.csv");
    add(report, "lo", w0.lo());
    add(report, "hi", w0.hi());
  } else if (kind == "separation") {
    const double n = s.number("n"), lambda = s.number("lambda"), t = s.number("t");
    const auto sol = c::separation_solve(n, lambda, {s.number("F0"), s.number("dF0"), s.number("d2F0")},
                                         s.number("c"), s.number("x0"), s.number("x1"),
                                         static_cast<std::size_t>(s.integer("samples")));
    const double g = sol.g(t);
    Csv csv(dir / "profile.csv", {"x", "F", "f", "u"});
    for (std::size_t i = 0; i < sol.x.size(); ++i) csv.row({sol.x[i], sol.F[i], sol.f[i], sol.f[i] * g});
    report.files.push_back(dir / "profile.csv");
    // F''' from the stored F'' closes F' + F''' + lambda f = 0.
    const double dx = sol.x[1] - sol.x[0];
    const int r = fd::stencil_radius(1, 4);
    for (std::size_t i = static_cast<std::size_t>(r); i + static_cast<std::size_t>(r) < sol.x.size(); ++i) {
      const double d3 = fd::interior_derivative(sol.d2F, i, dx, 1, 4);
      rows.push_back({sol.x[i], t, std::abs(sol.dF[i] + d3 + lambda * sol.f[i])});
    }
    add(report, "g", g);
  }
  write_residuals(report, dir, rows);
  return report;
}

}  // namespace

const char* to_string(Workflow w) {
  switch (w) {
    case Workflow::Simulate: return "simulate";
    case Workflow::ExactResidual: return "exact-residual";
    case Workflow::SymmetryCheck: return "symmetry-check";
    case Workflow::Reduce: return "reduce";
    case Workflow::Travel: return "travel";
    case Workflow::Constraint: return "constraint";
  }
  return "unknown";
}

Workflow parse_workflow(std::string_view name) {
  for (Workflow w : {Workflow::Simulate, Workflow::ExactResidual, Workflow::SymmetryCheck, Workflow::Reduce,
                     Workflow::Travel, Workflow::Constraint})
    if (name == to_string(w)) return w;
  throw ParseError(0, "unknown workflow '" + std::string(name) + "'");
}

double Scenario::number(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) throw DomainError("scenario has no value for '" + key + "'");
  if (it->second.word) throw DomainError("'" + key + "' is not numeric");
  return it->second.number;
}

Rational Scenario::rational(const std::string& key) const {
  number(key);
  const auto& v = values.at(key);
  if (!v.exact) throw DomainError("'" + key + "' must be given exactly (p/q or a short decimal)");
  return *v.exact;
}

long Scenario::integer(const std::string& key) const {
  const double v = number(key);
  if (v != std::floor(v)) throw DomainError("'" + key + "' must be an integer");
  return static_cast<long>(v);
}

const std::string& Scenario::word(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end() || !it->second.word) throw DomainError("scenario has no word for '" + key + "'");
  return it->second.text;
}

Scenario parse_config(std::string_view text, std::optional<Workflow> want) {
  std::vector<Section> sections;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
      const std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
      const std::string head = name.substr(0, name.find('.'));
      Workflow w;
      try {
        w = parse_workflow(head);
      } catch (const ParseError&) {
        throw ParseError(line_no, "unknown workflow section [" + name + "]");
      }
      for (const auto& sec : sections)
        if (sec.name == name) throw ParseError(line_no, "duplicate section [" + name + "]");
      sections.push_back({name, w, line_no, {}});
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
    if (sections.empty()) throw ParseError(line_no, "key outside of any [section]");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "empty key");
    if (value.empty()) throw ParseError(line_no, "empty value for '" + key + "'");
    auto& entries = sections.back().entries;
    for (const auto& [k, v] : entries)
      if (k == key) throw ParseError(line_no, "duplicate key '" + key + "'");
    Value v;
    v.text = value;
    v.line = line_no;
    entries.emplace_back(key, v);
  }

  if (sections.empty()) throw ParseError(0, "no [section] found");
  const Section* chosen = nullptr;
  for (const auto& sec : sections) {
    if (want && sec.workflow != *want) continue;
    if (chosen)
      throw ParseError(sec.line, "several scenarios for workflow " + std::string(to_string(sec.workflow)) +
                                     "; keep one per file");
    chosen = &sec;
  }
  if (!chosen) throw ParseError(0, "no [" + std::string(to_string(*want)) + "] section");
  return build(*chosen);
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunReport run(const Scenario& s, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error("io", "cannot create " + out_dir.string() + ": " + ec.message());
  RunReport r;
  switch (s.workflow) {
    case Workflow::Simulate: r = run_simulate(s, out_dir); break;
    case Workflow::ExactResidual: r = run_exact_residual(s, out_dir); break;
    case Workflow::SymmetryCheck: r = run_symmetry_check(s, out_dir); break;
    case Workflow::Reduce: r = run_reduce(s, out_dir); break;
    case Workflow::Travel: r = run_travel(s, out_dir); break;
    case Workflow::Constraint: r = run_constraint(s, out_dir); break;
  }
  r.summary.insert(r.summary.begin(), {"workflow", to_string(s.workflow)});
  return r;
}

}  // namespace kmn::cli
