#pragma once

#include <functional>
#include <span>
#include <vector>

namespace polyscale {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  CompensatedSum& operator+=(const CompensatedSum& o) {
    add(o.sum_);
    add(o.comp_);
    return *this;
  }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double mean(std::span<const double> xs);
/// Unbiased sample variance (n - 1 denominator).
double variance(std::span<const double> xs);

/// Average ranks (ties share the mean rank).
std::vector<double> ranks(std::span<const double> xs);
double spearman(std::span<const double> x, std::span<const double> y);
/// Spearman correlation of a sequence against its index.
double spearman_trend(std::span<const double> xs);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};
/// Weighted least squares y ~ a + b x with weights w (empty: unit weights).
LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> w = {});

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

/// Delete-a-group jackknife. stat(g) must return the statistic with group g
/// removed, stat(-1) the full-sample statistic.
Estimate group_jackknife(int groups, const std::function<double(int)>& stat);

double normal_pdf(double z);
double normal_cdf(double z);
double normal_quantile(double u);

}  // namespace polyscale
