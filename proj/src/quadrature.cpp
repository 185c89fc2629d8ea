#include "ssde/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "ssde/error.hpp"

namespace ssde {

QuadratureRule gauss_legendre(int n) {
  require(n >= 1, ErrorKind::Parameter, "quadrature order must be positive");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    jacobi(i, i - 1) = b;
    jacobi(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  QuadratureRule rule{es.eigenvalues(), 2.0 * es.eigenvectors().row(0).array().square().transpose()};
  return rule;
}

double integrate_box(const Point& lo, const Point& hi,
                     const std::function<double(const Point&)>& fn, int panels, int order) {
  const int d = static_cast<int>(lo.size());
  const QuadratureRule base = gauss_legendre(order);
  std::vector<std::vector<double>> nodes(d), weights(d);
  for (int a = 0; a < d; ++a) {
    const double width = (hi[a] - lo[a]) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = lo[a] + (p + 0.5) * width;
      for (int i = 0; i < order; ++i) {
        nodes[a].push_back(mid + 0.5 * width * base.nodes[i]);
        weights[a].push_back(0.5 * width * base.weights[i]);
      }
    }
  }
  const int per_axis = panels * order;
  Index total = 1;
  for (int a = 0; a < d; ++a) total *= per_axis;
  double sum = 0.0;
  Point x(d);
  for (Index c = 0; c < total; ++c) {
    Index rem = c;
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      const auto i = static_cast<std::size_t>(rem % per_axis);
      rem /= per_axis;
      x[a] = nodes[a][i];
      w *= weights[a][i];
    }
    sum += w * fn(x);
  }
  return sum;
}

}  // namespace ssde
