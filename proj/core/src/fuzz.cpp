#include <random>
#include <sstream>

#include "vforge/runner.hpp"

namespace vforge::cli {

namespace {

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  int between(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::string monomial(int r, int max_exp, bool allow_one) {
    std::string out;
    for (int k = 1; k <= r; ++k) {
      int e = between(0, max_exp);
      if (e == 0) continue;
      if (!out.empty()) out += "*";
      out += "x" + std::to_string(k) + (e > 1 ? "^" + std::to_string(e) : "");
    }
    if (out.empty()) return allow_one ? "1" : "x" + std::to_string(between(1, r));
    return out;
  }

  std::string coefficient() {
    int c = between(1, 9) * (between(0, 1) ? 1 : -1);
    return std::to_string(c);
  }

  std::string element(int r, int terms, int max_exp) {
    std::string out;
    for (int k = 0; k < terms; ++k) {
      std::string c = coefficient();
      if (k > 0) out += c[0] == '-' ? " - " : " + ";
      out += (k > 0 && c[0] == '-' ? c.substr(1) : c) + "*" + monomial(r, max_exp, true);
    }
    return out;
  }

  std::string header(const std::string& kind, int r, bool prime_field) {
    std::ostringstream out;
    out << "blocks: " << r << "\nvars:";
    for (int k = 1; k <= r; ++k) out << " x" << k << "@1";
    out << "\nfield: " << (prime_field ? "F 5" : "Q") << "\ntask: " << kind << "\n";
    return out.str();
  }

  std::string task(std::size_t index) {
    const int r = between(1, 3);
    switch (index % 5) {
      case 0:
        return header("monomialize", r, between(0, 1) == 1) + "poly f: " + element(r, between(1, 4), 4) + "\n";
      case 1:
        return header("principalize", r, false) + "poly a: " + monomial(r, 5, false) + "\npoly b: " +
               monomial(r, 5, false) + "\npoly c: " + monomial(r, 5, false) + "\n";
      case 2:
        return header("dominate", r, false) + "poly m1: " + monomial(r, 6, false) + "\npoly m2: " +
               monomial(r, 6, false) + "\n";
      case 3:
        return header("fraction", r, false) + "poly g: " + element(r, between(1, 3), 3) + "\npoly h: " +
               element(r, between(1, 3), 3) + "\n";
      default: {
        // Planted roots z = s(x1) with s in x1 Z[x1].
        std::string text = "blocks: 1\nvars: x1@1 z@free\nfield: Q\ntask: expand\norder: 6\nrelation z: ";
        int roots = between(1, 2);
        for (int k = 0; k < roots; ++k) {
          if (k > 0) text += "*";
          text += "(z - (" + coefficient() + "*x1";
          int extra = between(0, 2);
          for (int e = 2; e < 2 + extra; ++e) text += " + " + std::to_string(between(1, 5)) + "*x1^" + std::to_string(e);
          text += "))";
        }
        return text + "\n";
      }
    }
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

FuzzResult fuzz(std::uint64_t seed, std::size_t cases) {
  Generator gen(seed);
  FuzzResult result;
  std::ostringstream summary;
  for (std::size_t k = 0; k < cases; ++k) {
    std::string text = gen.task(k);
    ++result.cases;
    RunResult first = run_text(text);
    std::string problem;
    if (first.exit_code == kSuccess || first.exit_code == kMathFailure) {
      VerifyResult v = verify_text(first.log, text);
      if (v.exit_code != kSuccess) problem = "verify: " + v.reason;
      else if (run_text(text).log != first.log) problem = "log not reproducible";
    } else {
      problem = "exit " + std::to_string(first.exit_code) + ": " + first.report;
    }
    if (!problem.empty()) {
      ++result.failures;
      summary << "case " << k << " failed (" << problem << ")\n" << text;
    }
  }
  summary << result.cases << " case(s), " << result.failures << " failure(s)\n";
  result.summary = summary.str();
  return result;
}

}  // namespace vforge::cli
