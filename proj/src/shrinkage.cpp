#include "lqshrink/shrinkage.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "lqshrink/error.hpp"
#include "lqshrink/penalty.hpp"

namespace lqshrink {

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Every catalog rule is r(x, a) = sign(x) m(|x|, a), which makes odd symmetry exact in floating
// point and keeps the rule definitions to their magnitude part.
template <class Magnitude>
ShrinkageRule::Map odd(Magnitude magnitude) {
  return [magnitude](double x, double alpha) {
    if (x == 0.0) return 0.0;
    return sign(x) * magnitude(std::abs(x), alpha);
  };
}

std::string format_param(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", value);
  return buf;
}

double parse_number(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw DomainError("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  return value;
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < n; ++i) out[i] = std::pow(10.0, a + (b - a) * i / (n - 1));
  return out;
}

}  // namespace

ShrinkageRule::ShrinkageRule(std::string name, Map map, AxiomConstants constants)
    : name_(std::move(name)), map_(std::move(map)), constants_(constants) {
  if (!map_) throw DomainError("shrinkage rule '" + name_ + "' has no map");
}

double ShrinkageRule::min_q() const noexcept {
  return std::isinf(constants_.rho) ? 0.0 : 1.0 / constants_.rho;
}

QDependentRule::QDependentRule(ShrinkageRule base, double q) : base_(std::move(base)), q_(q) {
  require_q(q);
}

double QDependentRule::operator()(double x, double alpha) const {
  if (x == 0.0) return 0.0;
  const double scaled = q_ == 1.0 ? alpha : alpha * std::pow(std::abs(x), q_ - 1.0);
  return base_(x, scaled);
}

QDependentRule wrap_q(ShrinkageRule base, double q) { return QDependentRule(std::move(base), q); }

double cq(double q) {
  require_q(q, 0.0, 1.0);
  // std::pow(0, 0) == 1 gives the continuous extension at q = 1.
  return std::pow(2.0, q - 2.0) * std::pow(2.0 - q, 2.0 - q) / std::pow(1.0 - q, 1.0 - q);
}

namespace rules {

ShrinkageRule soft() {
  return {"soft", odd([](double m, double a) { return m > a ? m - a : 0.0; }),
          {.c1 = 1, .c2 = 1, .rho = kInfinity, .d = 1, .c3 = 1.0}};
}

ShrinkageRule hard() {
  return {"hard", odd([](double m, double a) { return m > a ? m : 0.0; }),
          {.c1 = 1, .c2 = 1, .rho = kInfinity, .d = 1, .c3 = 1.0}};
}

ShrinkageRule garotte() {
  return {"garotte", odd([](double m, double a) { return m > a ? m - a * a / m : 0.0; }),
          {.c1 = 1, .c2 = 1, .rho = kInfinity, .d = 1, .c3 = 1.0}};
}

ShrinkageRule hyperbolic() {
  return {"hyperbolic",
          odd([](double m, double a) { return m > a ? std::sqrt((m - a) * (m + a)) : 0.0; }),
          {.c1 = 1, .c2 = 1, .rho = kInfinity, .d = 1, .c3 = 1.0}};
}

ShrinkageRule n_degree_garotte(int n) {
  if (n < 1) throw DomainError("n-degree garotte needs n >= 1");
  const int p = 2 * n;
  return {"ndeg:" + std::to_string(n),
          odd([p](double m, double a) { return m / (1.0 + std::pow(a / m, p)); }),
          {.c1 = 1, .c2 = 1, .rho = static_cast<double>(p), .d = 1, .c3 = std::nullopt}};
}

ShrinkageRule smooth_k(int k) {
  if (k < 1) throw DomainError("rule k needs k >= 1");
  const int p = 2 * k;
  const double denom = 2.0 * k + 1.0;
  return {"k:" + std::to_string(k),
          odd([p, denom](double m, double a) {
            if (m <= a) return m * std::pow(m / a, p) / denom;
            return m - (a - a / denom);
          }),
          {.c1 = 1, .c2 = 1, .rho = static_cast<double>(p), .d = 1, .c3 = std::nullopt}};
}

ShrinkageRule diffusion1() {
  // 1 - a / sqrt(a^2 + 2 m^2) written without cancellation for m << a.
  return {"diff1",
          odd([](double m, double a) {
            if (a == 0.0) return m;
            const double u = 2.0 * (m / a) * (m / a);
            const double s = std::sqrt(1.0 + u);
            return m * (u / (s * (1.0 + s)));
          }),
          {.c1 = 1, .c2 = 1, .rho = 1, .d = 1, .c3 = std::nullopt}};
}

ShrinkageRule diffusion2() {
  return {"diff2", odd([](double m, double a) { return m * std::exp(-0.2 * std::pow(a / m, 8)); }),
          {.c1 = 1, .c2 = 1, .rho = 1, .d = 1, .c3 = std::nullopt}};
}

ShrinkageRule firm(double alpha1, double alpha_max) {
  if (!(alpha1 > 0.0) || !(alpha_max >= alpha1)) {
    throw DomainError("firm shrinkage needs 0 < alpha1 <= alpha_max");
  }
  const double c3 = alpha1 / alpha_max;
  return {"firm:" + format_param(alpha1),
          odd([alpha1](double m, double a) {
            if (m > a) return m;
            // Middle branch {alpha1 <= |x| <= alpha}; empty once alpha <= alpha1.
            if (a > alpha1 && m >= alpha1) return a * (m - alpha1) / (a - alpha1);
            return 0.0;
          }),
          {.c1 = 1, .c2 = 1, .rho = kInfinity, .d = c3, .c3 = c3}};
}

ShrinkageRule ridge() {
  return {"ridge", odd([](double m, double a) { return m * m / (m + a); }),
          {.c1 = 1, .c2 = 1, .rho = 1, .d = 1, .c3 = std::nullopt}};
}

ShrinkageRule hard_soft(double q) {
  const double c = cq(q);
  return {"hs:" + format_param(q),
          odd([q, c](double m, double a) { return m > a * c ? m - q * c * a : 0.0; }),
          {.c1 = 1, .c2 = 1, .rho = kInfinity, .d = c, .c3 = c}};
}

}  // namespace rules

std::vector<ShrinkageRule> catalog() {
  return {rules::soft(),
          rules::hard(),
          rules::garotte(),
          rules::hyperbolic(),
          rules::n_degree_garotte(1),
          rules::n_degree_garotte(2),
          rules::smooth_k(1),
          rules::smooth_k(2),
          rules::diffusion1(),
          rules::diffusion2(),
          rules::firm(1.0),
          rules::firm(2.0),
          rules::ridge()};
}

ShrinkageRule rule_by_name(std::string_view name, std::optional<double> default_q) {
  const auto colon = name.find(':');
  const std::string_view head = name.substr(0, colon);
  const std::string_view arg =
      colon == std::string_view::npos ? std::string_view{} : name.substr(colon + 1);
  const bool has_arg = colon != std::string_view::npos;
  auto require_no_arg = [&] {
    if (has_arg) throw DomainError("rule '" + std::string(head) + "' takes no parameter");
  };
  auto integer_arg = [&] {
    const double v = parse_number(arg, "rule parameter");
    if (v != std::floor(v)) throw DomainError("rule '" + std::string(name) + "' needs an integer");
    return static_cast<int>(v);
  };

  if (head == "soft") return require_no_arg(), rules::soft();
  if (head == "hard") return require_no_arg(), rules::hard();
  if (head == "garotte") return require_no_arg(), rules::garotte();
  if (head == "hyperbolic") return require_no_arg(), rules::hyperbolic();
  if (head == "diff1") return require_no_arg(), rules::diffusion1();
  if (head == "diff2") return require_no_arg(), rules::diffusion2();
  if (head == "ridge") return require_no_arg(), rules::ridge();
  if (head == "ndeg" && has_arg) return rules::n_degree_garotte(integer_arg());
  if (head == "k" && has_arg) return rules::smooth_k(integer_arg());
  if (head == "firm" && has_arg) return rules::firm(parse_number(arg, "firm alpha1"));
  if (head == "hs") {
    if (has_arg) return rules::hard_soft(parse_number(arg, "hs q"));
    if (default_q) return rules::hard_soft(*default_q);
    throw DomainError("rule 'hs' needs q, e.g. 'hs:0.3'");
  }
  throw DomainError("unknown shrinkage rule '" + std::string(name) + "'");
}

AxiomGrid AxiomGrid::default_grid() {
  AxiomGrid grid;
  const auto mags = logspace(1e-4, 1e4, 200);
  grid.xs.reserve(2 * mags.size() + 1);
  grid.xs.push_back(0.0);
  for (double m : mags) {
    grid.xs.push_back(m);
    grid.xs.push_back(-m);
  }
  grid.alphas = logspace(1e-3, 1e3, 50);
  return grid;
}

std::string_view to_string(Axiom axiom) {
  switch (axiom) {
    case Axiom::kApproximation: return "approximation";
    case Axiom::kDecay: return "decay";
    case Axiom::kThreshold: return "threshold";
    case Axiom::kOddSymmetry: return "odd-symmetry";
  }
  return "unknown";
}

AxiomReport check_axioms(const ShrinkageRule& rule, const AxiomGrid& grid) {
  // Slack for rounding in the rule evaluation; zero bounds are still checked exactly.
  constexpr double kSlack = 1.0 + 1e-12;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  const auto& k = rule.constants();
  AxiomReport report;
  report.rule = rule.name();

  for (double alpha : grid.alphas) {
    for (double x : grid.xs) {
      ++report.points_checked;
      const double r = rule(x, alpha);
      const double ax = std::abs(x);

      // x - r itself is rounded at the scale of x, so allow a few ulps of |x| on top.
      const double approx_bound = k.c1 * std::min(ax, alpha);
      if (!(std::abs(x - r) <= approx_bound * kSlack + 4.0 * kEps * ax)) {
        report.violations.push_back({Axiom::kApproximation, x, alpha, std::abs(x - r), approx_bound});
      }

      if (alpha > 0.0 && ax <= k.d * alpha) {
        const double ratio = ax / alpha;
        double factor;
        if (std::isinf(k.rho)) {
          factor = ratio < 1.0 ? 0.0 : (ratio == 1.0 ? 1.0 : kInfinity);
        } else {
          factor = std::pow(ratio, k.rho);
        }
        const double decay_bound = k.c2 * ax * factor;
        if (!(std::abs(r) <= decay_bound * kSlack)) {
          report.violations.push_back({Axiom::kDecay, x, alpha, std::abs(r), decay_bound});
        }
      }

      if (k.c3 && ax <= *k.c3 * alpha && r != 0.0) {
        report.violations.push_back({Axiom::kThreshold, x, alpha, std::abs(r), 0.0});
      }

      if (rule(-x, alpha) != -r) {
        report.violations.push_back({Axiom::kOddSymmetry, x, alpha, rule(-x, alpha), -r});
      }
    }
  }
  return report;
}

}  // namespace lqshrink
