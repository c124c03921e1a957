#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sils {

// Exact nonnegative big-integer counts (binomial coefficients, Bernoulli trial
// totals). C(n, d+2) overflows 64 bits well inside realistic n, so ratios like
// p_n = N / C(n,r) are formed exactly and only then rounded to double.
class BigCount {
 public:
  BigCount() : z_(0) {}
  explicit BigCount(std::uint64_t v) { set_u64(v); }

  static BigCount binom(std::uint64_t n, std::uint64_t k) {
    BigCount out;
    if (k > n) return out;  // 0
    mpz_bin_uiui(out.z_.get_mpz_t(), static_cast<unsigned long>(n),
                 static_cast<unsigned long>(k));
    return out;
  }

  friend BigCount operator-(const BigCount& a, const BigCount& b) {
    if (a.z_ < b.z_) throw std::invalid_argument("BigCount: negative difference");
    BigCount out;
    out.z_ = a.z_ - b.z_;
    return out;
  }
  friend BigCount operator+(const BigCount& a, const BigCount& b) {
    BigCount out;
    out.z_ = a.z_ + b.z_;
    return out;
  }
  friend bool operator==(const BigCount& a, const BigCount& b) { return a.z_ == b.z_; }
  friend bool operator<(const BigCount& a, const BigCount& b) { return a.z_ < b.z_; }
  friend bool operator<=(const BigCount& a, const BigCount& b) { return a.z_ <= b.z_; }

  bool is_zero() const { return z_ == 0; }

  // Exact when the value fits in a double mantissa (<= 2^53).
  bool exact_in_double() const {
    static const mpz_class cap = mpz_class(1) << 53;
    return z_ <= cap;
  }

  bool fits_u64() const { return z_.fits_ulong_p() || mpz_sizeinbase(z_.get_mpz_t(), 2) <= 64; }

  std::uint64_t as_u64() const {
    if (mpz_sizeinbase(z_.get_mpz_t(), 2) > 64)
      throw std::overflow_error("BigCount: does not fit in 64 bits");
    std::uint64_t lo = mpz_get_ui(z_.get_mpz_t());
    if (mpz_sizeinbase(z_.get_mpz_t(), 2) > 8 * sizeof(unsigned long)) {
      mpz_class hi = z_ >> 32;
      lo = (static_cast<std::uint64_t>(mpz_get_ui(hi.get_mpz_t())) << 32) |
           (mpz_get_ui(z_.get_mpz_t()) & 0xFFFFFFFFull);
    }
    return lo;
  }

  double to_double() const { return z_.get_d(); }

  // num/den rounded to double, computed through an exact rational.
  static double ratio(const BigCount& num, const BigCount& den) {
    if (den.is_zero()) throw std::invalid_argument("BigCount::ratio: zero denominator");
    mpq_class q(num.z_, den.z_);
    q.canonicalize();
    return q.get_d();
  }

  // p * value in 128-bit floating point, then rounded to double (Poisson mean
  // for trial counts beyond 2^53).
  double scaled_by(double p) const {
    mpf_class f(z_, 128);
    f *= mpf_class(p, 128);
    return f.get_d();
  }

  std::string str() const { return z_.get_str(); }

 private:
  void set_u64(std::uint64_t v) {
    mpz_import(z_.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  }
  mpz_class z_;
};

}  // namespace sils
