#include "mirrorchain/linalg.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "mirrorchain/errors.hpp"

namespace mirrorchain {

void require_dense_size(int n_sites, int cap) {
  if (n_sites < 0) throw DomainError("negative site count");
  if (n_sites > cap) {
    throw ResourceError("dense operator on " + std::to_string(n_sites) +
                        " sites exceeds the cap of " + std::to_string(cap));
  }
}

int sites_for_dimension(Eigen::Index dim) {
  if (dim <= 0 || (dim & (dim - 1)) != 0) {
    throw DimensionError("dimension " + std::to_string(dim) +
                         " is not a power of two");
  }
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  return n;
}

double max_abs(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

bool is_unitary(const Matrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  const Matrix residual = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
  return max_abs(residual) <= tol;
}

bool is_hermitian(const Matrix& h, double tol) {
  if (h.rows() != h.cols()) return false;
  return max_abs(h - h.adjoint()) <= tol;
}

void require_unitary(const Matrix& u, double tol) {
  if (u.rows() != u.cols()) throw DimensionError("operator is not square");
  if (!is_unitary(u, tol)) throw ValidationError("operator is not unitary");
}

void require_hermitian(const Matrix& h, double tol) {
  if (h.rows() != h.cols()) throw DimensionError("operator is not square");
  if (!is_hermitian(h, tol)) throw ValidationError("operator is not Hermitian");
}

namespace {

// Union-find over basis indices; two indices share a block when H couples them.
std::vector<std::vector<Eigen::Index>> coupled_blocks(const Matrix& h) {
  const Eigen::Index dim = h.rows();
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(dim));
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto find = [&](Eigen::Index a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < c; ++r) {
      if (h(r, c) != complex{0.0, 0.0} || h(c, r) != complex{0.0, 0.0}) {
        const auto ra = find(r);
        const auto rb = find(c);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }
    }
  }
  std::vector<std::vector<Eigen::Index>> blocks;
  std::vector<Eigen::Index> slot(static_cast<std::size_t>(dim), -1);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<Eigen::Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[slot[root]].push_back(i);
  }
  return blocks;
}

}  // namespace

Matrix hermitian_exp(const Matrix& h, double t) {
  require_hermitian(h);
  const Eigen::Index dim = h.rows();
  Matrix out = Matrix::Zero(dim, dim);
  for (const auto& block : coupled_blocks(h)) {
    const auto size = static_cast<Eigen::Index>(block.size());
    if (size == 1) {
      const Eigen::Index i = block.front();
      out(i, i) = std::exp(-kI * h(i, i).real() * t);
      continue;
    }
    Matrix sub(size, size);
    for (Eigen::Index a = 0; a < size; ++a) {
      for (Eigen::Index b = 0; b < size; ++b) sub(a, b) = h(block[a], block[b]);
    }
    // Symmetrise so round-off in the input cannot leak into the solver.
    sub = 0.5 * (sub + sub.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sub);
    const Vector phases =
        (-kI * t * solver.eigenvalues().cast<complex>()).array().exp().matrix();
    const Matrix sub_exp =
        solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
    for (Eigen::Index a = 0; a < size; ++a) {
      for (Eigen::Index b = 0; b < size; ++b) out(block[a], block[b]) = sub_exp(a, b);
    }
  }
  return out;
}

double unitary_fidelity(const Matrix& u, const Matrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw DimensionError("fidelity operands differ in shape");
  }
  return std::abs((u.adjoint() * v).trace()) / static_cast<double>(u.rows());
}

unsigned worker_threads() {
  static const unsigned threads = [] {
    if (const char* env = std::getenv("MIRRORCHAIN_THREADS")) {
      const long value = std::strtol(env, nullptr, 10);
      if (value > 0) return static_cast<unsigned>(value);
    }
    return std::max(1u, std::thread::hardware_concurrency());
  }();
  return threads;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t threads = std::min<std::size_t>(worker_threads(), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  pool.reserve(threads);
  const std::size_t chunk = (count + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, &errors, t, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

}  // namespace mirrorchain
