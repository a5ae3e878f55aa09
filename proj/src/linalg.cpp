#include "lurecert/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <stack>
#include <stdexcept>
#include <vector>

namespace lurecert {

bool is_nonneg(const Matrix& M, double tol) {
  return (M.array() >= -tol).all();
}

bool is_strictly_positive(const Matrix& M, double tol) {
  return (M.array() > tol).all();
}

double weighted_seminorm(const Vector& z, const Vector& v) {
  if (z.size() != v.size())
    throw std::invalid_argument("weighted_seminorm: size mismatch");
  if (!is_nonneg(v, 0.0))
    throw std::invalid_argument("weighted_seminorm: weight must be nonnegative");
  return v.dot(z.cwiseAbs());
}

bool is_metzler(const Matrix& M, double tol) {
  if (M.rows() != M.cols())
    throw std::invalid_argument("is_metzler: matrix must be square");
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      if (i != j && M(i, j) < -tol) return false;
  return true;
}

namespace {

Eigen::VectorXcd eigenvalues_checked(const Matrix& M) {
  if (M.rows() != M.cols())
    throw std::invalid_argument("eigenvalues: matrix must be square");
  Eigen::EigenSolver<Matrix> solver(M, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigenvalues: QR iteration did not converge");
  return solver.eigenvalues();
}

}  // namespace

double spectral_abscissa(const Matrix& M) {
  return eigenvalues_checked(M).real().maxCoeff();
}

double spectral_radius(const Matrix& M) {
  return eigenvalues_checked(M).cwiseAbs().maxCoeff();
}

bool is_hurwitz(const Matrix& M) { return spectral_abscissa(M) < 0.0; }

bool is_hurwitz_metzler_crosscheck(const Matrix& M) {
  if (!is_metzler(M))
    throw std::invalid_argument("is_hurwitz_metzler_crosscheck: not Metzler");
  const double abscissa = spectral_abscissa(M);
  const bool by_spectrum = abscissa < 0.0;

  bool by_inverse = false;
  Eigen::FullPivLU<Matrix> lu(M);
  if (lu.isInvertible()) by_inverse = is_nonneg(-lu.inverse(), 1e-7);

  // Near the stability boundary the inverse blows up and its sign pattern is
  // unreliable; only insist on agreement away from it.
  if (by_spectrum != by_inverse && std::abs(abscissa) > 1e-7)
    throw std::logic_error(
        "is_hurwitz_metzler_crosscheck: spectral and inverse-sign criteria "
        "disagree");
  return by_spectrum;
}

bool is_irreducible(const Matrix& M, double pattern_tol) {
  if (M.rows() != M.cols())
    throw std::invalid_argument("is_irreducible: matrix must be square");
  const int n = static_cast<int>(M.rows());
  if (n == 0) throw std::invalid_argument("is_irreducible: empty matrix");
  if (n == 1) return true;

  std::vector<std::vector<int>> adj(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (i != j && std::abs(M(i, j)) > pattern_tol) adj[j].push_back(i);

  // Iterative Tarjan; irreducible iff exactly one strongly connected component.
  std::vector<int> index(n, -1), lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::stack<int> stack;
  int next_index = 0, scc_count = 0;

  struct Frame {
    int v;
    size_t child;
  };
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::stack<Frame> call;
    call.push({root, 0});
    index[root] = lowlink[root] = next_index++;
    stack.push(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.top();
      if (f.child < adj[f.v].size()) {
        int w = adj[f.v][f.child++];
        if (index[w] == -1) {
          index[w] = lowlink[w] = next_index++;
          stack.push(w);
          on_stack[w] = true;
          call.push({w, 0});
        } else if (on_stack[w]) {
          lowlink[f.v] = std::min(lowlink[f.v], index[w]);
        }
      } else {
        if (lowlink[f.v] == index[f.v]) {
          ++scc_count;
          int w;
          do {
            w = stack.top();
            stack.pop();
            on_stack[w] = false;
          } while (w != f.v);
        }
        int v = f.v;
        call.pop();
        if (!call.empty())
          lowlink[call.top().v] = std::min(lowlink[call.top().v], lowlink[v]);
      }
    }
  }
  return scc_count == 1;
}

PerronPair perron_left_vector(const Matrix& M, double residual_tol,
                              int max_iter) {
  if (M.rows() != M.cols())
    throw std::invalid_argument("perron_left_vector: matrix must be square");
  if (!is_nonneg(M))
    throw std::invalid_argument("perron_left_vector: matrix must be nonnegative");
  if (!is_irreducible(M))
    throw std::invalid_argument("perron_left_vector: matrix must be irreducible");

  const Eigen::Index n = M.rows();
  const Matrix Mt = M.transpose().cwiseMax(0.0);
  const double shift = 1.0 + Mt.maxCoeff();

  Vector v = Vector::Constant(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < max_iter; ++it) {
    Vector next = Mt * v + shift * v;
    next /= next.sum();
    const double change = (next - v).cwiseAbs().maxCoeff();
    v = next;
    if (change < 1e-15) break;
  }

  const Vector image = Mt * v;
  const double rho = image.sum();  // v sums to one, so v^T M 1 = rho
  const double residual = (image - rho * v).cwiseAbs().maxCoeff();
  if (residual > residual_tol * std::max(1.0, rho))
    throw std::runtime_error("perron_left_vector: power iteration stagnated");
  return {rho, v};
}

Matrix matrix_exp(const Matrix& M, double t) {
  if (M.rows() != M.cols())
    throw std::invalid_argument("matrix_exp: matrix must be square");
  const Eigen::Index n = M.rows();
  Matrix A = M * t;

  // Degree-13 Pade approximant with scaling and squaring (Higham 2005).
  static const double b[] = {64764752532480000.0, 32382376266240000.0,
                             7771770303897600.0,  1187353796428800.0,
                             129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,
                             1323241920.0,        40840800.0,
                             960960.0,            16380.0,
                             182.0,               1.0};
  const double theta13 = 5.371920351148152;

  const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    A /= std::pow(2.0, squarings);
  }

  const Matrix A2 = A * A;
  const Matrix A4 = A2 * A2;
  const Matrix A6 = A4 * A2;
  const Matrix I = Matrix::Identity(n, n);
  const Matrix U =
      A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 +
           b[3] * A2 + b[1] * I);
  const Matrix V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 +
                   b[4] * A4 + b[2] * A2 + b[0] * I;

  Eigen::PartialPivLU<Matrix> lu(V - U);
  Matrix E = lu.solve(V + U);
  for (int s = 0; s < squarings; ++s) E = E * E;

  if (t >= 0.0 && is_metzler(M, 0.0)) {
    const double worst = E.minCoeff();
    if (worst < -1e-12)
      throw std::runtime_error(
          "matrix_exp: exponential of a Metzler matrix came out negative "
          "beyond tolerance");
    E = E.cwiseMax(0.0);
  }
  return E;
}

}  // namespace lurecert
