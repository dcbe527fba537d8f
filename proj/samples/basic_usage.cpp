// Draws a few 2 x 3 arrays from an array t model and scores them under the
// t and normal kernels, then recovers a core array by multilinear least
// squares.

#include <iostream>

#include "arrayvariate/arrayvariate.hpp"

namespace av = arrayvariate;

int main() {
  const av::DenseMatrix rows{{1.0, 0.0}, {0.5, 2.0}};
  const av::DenseMatrix cols{{1.0, 0.2, 0.0}, {0.0, 1.0, 0.3}, {0.0, 0.0, 0.5}};
  const av::KroneckerModel model =
      av::KroneckerModel::centered({rows, cols}, av::Kernel::student_t(5.0));

  av::RandomStream stream(42);
  const auto draws = av::sample_elliptical(model, 3, stream);
  for (const auto& x : draws) {
    std::cout << "log f_t = " << av::logpdf_elliptical(model, x)
              << "   log f_normal = " << av::logpdf_normal(model, x) << '\n';
  }

  // Y = (B_1)^1 (B_2)^2 X + E with tall maps; the estimator recovers X when E = 0.
  const av::DenseMatrix b1{{1.0, 0.0}, {1.0, 1.0}, {0.0, 2.0}};
  const av::DenseMatrix b2{{2.0, 0.0, 1.0}, {0.0, 1.0, 0.0}, {1.0, 1.0, 1.0}, {0.0, 0.0, 3.0}};
  const av::ModeMaps maps{b1, b2};
  const av::DataArray y = av::r_multiply(maps, draws.front());
  const av::DataArray x_hat = av::multilinear_lstsq(maps, y);
  std::cout << "recovery error = " << av::distance(x_hat, draws.front()) << '\n';
  av::write_array(std::cout, x_hat);
}
