#include "mirrorchain/pauli.hpp"

#include <bit>
#include <cmath>

#include "mirrorchain/errors.hpp"

namespace mirrorchain {

namespace {

std::uint64_t site_bit(int n, int site) { return std::uint64_t{1} << (n - site); }

void check_same_sites(const PauliString& a, const PauliString& b) {
  if (a.n_sites() != b.n_sites()) {
    throw DimensionError("Pauli words on " + std::to_string(a.n_sites()) + " and " +
                         std::to_string(b.n_sites()) + " sites");
  }
}

constexpr complex kPhaseTable[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};

// (-1)^popcount(z & c) * i^popcount(x & z): the amplitude P carries from |c>
// to |c ^ x>.
complex column_phase(std::uint64_t x, std::uint64_t z, std::uint64_t c) {
  const int power = std::popcount(x & z) + 2 * std::popcount(z & c);
  return kPhaseTable[power & 3];
}

}  // namespace

PauliString::PauliString(int n_sites) : n_(n_sites) {
  if (n_sites < 1 || n_sites > kMaxSites) {
    throw DomainError("Pauli word site count must be in [1, 32], got " +
                      std::to_string(n_sites));
  }
}

PauliString PauliString::parse(std::string_view letters) {
  if (letters.empty()) throw DomainError("empty Pauli word");
  PauliString p(static_cast<int>(letters.size()));
  for (int site = 1; site <= p.n_; ++site) {
    const std::uint64_t bit = site_bit(p.n_, site);
    switch (letters[static_cast<std::size_t>(site - 1)]) {
      case 'I': break;
      case 'X': p.x_ |= bit; break;
      case 'Y': p.x_ |= bit; p.z_ |= bit; break;
      case 'Z': p.z_ |= bit; break;
      default:
        throw ParseError("invalid Pauli letter in \"" + std::string(letters) + "\"");
    }
  }
  return p;
}

PauliString PauliString::from_masks(int n_sites, std::uint64_t x, std::uint64_t z) {
  PauliString p(n_sites);
  const std::uint64_t mask =
      n_sites == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_sites) - 1;
  if ((x | z) & ~mask) throw DomainError("Pauli mask has bits beyond the site count");
  p.x_ = x;
  p.z_ = z;
  return p;
}

PauliString PauliString::single(int n_sites, int site, char letter) {
  if (site < 1 || site > n_sites) throw DomainError("site out of range");
  std::string text(static_cast<std::size_t>(n_sites), 'I');
  text[static_cast<std::size_t>(site - 1)] = letter;
  return parse(text);
}

char PauliString::letter(int site) const {
  const std::uint64_t bit = site_bit(n_, site);
  const bool x = x_ & bit;
  const bool z = z_ & bit;
  if (x && z) return 'Y';
  if (x) return 'X';
  if (z) return 'Z';
  return 'I';
}

int PauliString::weight() const { return std::popcount(x_ | z_); }

bool PauliString::commutes_with(const PauliString& other) const {
  check_same_sites(*this, other);
  // Symplectic form: sites where exactly one of x.z' and z.x' is set anticommute.
  return ((std::popcount(x_ & other.z_) + std::popcount(z_ & other.x_)) & 1) == 0;
}

std::string PauliString::str() const {
  std::string out(static_cast<std::size_t>(n_), 'I');
  for (int site = 1; site <= n_; ++site) out[static_cast<std::size_t>(site - 1)] = letter(site);
  return out;
}

std::uint64_t PauliString::canonical_key() const {
  // Letter codes I=0, X=1, Y=2, Z=3, two bits per site, site 1 most significant.
  std::uint64_t key = 0;
  for (int site = 1; site <= n_; ++site) {
    const std::uint64_t bit = site_bit(n_, site);
    const bool x = x_ & bit;
    const bool z = z_ & bit;
    const std::uint64_t code = x ? (z ? 2 : 1) : (z ? 3 : 0);
    key = (key << 2) | code;
  }
  return key;
}

std::strong_ordering canonical_compare(const PauliString& a, const PauliString& b) {
  if (auto c = a.n_sites() <=> b.n_sites(); c != 0) return c;
  return a.canonical_key() <=> b.canonical_key();
}

complex PhasedPauli::phase() const { return kPhaseTable[power & 3]; }

std::string PhasedPauli::phase_str() const {
  static const char* names[4] = {"+1", "+i", "-1", "-i"};
  return names[power & 3];
}

int PhasedPauli::parse_phase(std::string_view text) {
  if (text == "+1" || text == "1") return 0;
  if (text == "+i" || text == "i") return 1;
  if (text == "-1") return 2;
  if (text == "-i") return 3;
  throw ParseError("invalid Pauli phase \"" + std::string(text) + "\"");
}

PauliString word_product(const PauliString& a, const PauliString& b) {
  check_same_sites(a, b);
  return PauliString::from_masks(a.n_sites(), a.x_mask() ^ b.x_mask(),
                                 a.z_mask() ^ b.z_mask());
}

PhasedPauli pauli_mul(const PauliString& a, const PauliString& b) {
  check_same_sites(a, b);
  // With P = i^{x.z} X^x Z^z, moving Z^{z1} past X^{x2} contributes (-1)^{z1.x2}.
  const std::uint64_t x = a.x_mask() ^ b.x_mask();
  const std::uint64_t z = a.z_mask() ^ b.z_mask();
  const int power = std::popcount(a.x_mask() & a.z_mask()) +
                    std::popcount(b.x_mask() & b.z_mask()) +
                    2 * std::popcount(a.z_mask() & b.x_mask()) - std::popcount(x & z);
  return PhasedPauli{((power % 4) + 4) % 4, PauliString::from_masks(a.n_sites(), x, z)};
}

Matrix pauli_matrix(const PhasedPauli& p, int cap) {
  const int n = p.word.n_sites();
  require_dense_size(n, cap);
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix m = Matrix::Zero(dim, dim);
  const complex global = p.phase();
  for (Eigen::Index c = 0; c < dim; ++c) {
    const auto col = static_cast<std::uint64_t>(c);
    m(static_cast<Eigen::Index>(col ^ p.word.x_mask()), c) =
        global * column_phase(p.word.x_mask(), p.word.z_mask(), col);
  }
  return m;
}

Matrix pauli_matrix(const PauliString& p, int cap) { return pauli_matrix(PhasedPauli{0, p}, cap); }

complex pauli_trace(const Matrix& u, const PauliString& p) {
  const Eigen::Index dim = u.rows();
  if (u.cols() != dim || dim != (Eigen::Index{1} << p.n_sites())) {
    throw DimensionError("operator dimension does not match Pauli word");
  }
  // P maps |c> to phase(c) |c^x>, so (U P)[c, c] = U[c, c^x] phase(c).
  const std::uint64_t x = p.x_mask();
  const std::uint64_t z = p.z_mask();
  complex acc{0.0, 0.0};
  for (Eigen::Index c = 0; c < dim; ++c) {
    const auto col = static_cast<std::uint64_t>(c);
    acc += u(c, static_cast<Eigen::Index>(col ^ x)) * column_phase(x, z, col);
  }
  return acc;
}

Matrix right_multiply(const Matrix& u, const PauliString& p) {
  const Eigen::Index dim = u.cols();
  if (dim != (Eigen::Index{1} << p.n_sites())) {
    throw DimensionError("operator dimension does not match Pauli word");
  }
  // (U P)[:, c] = phase(c) U[:, c^x]
  Matrix out(u.rows(), dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    const auto col = static_cast<std::uint64_t>(c);
    out.col(c) = column_phase(p.x_mask(), p.z_mask(), col) *
                 u.col(static_cast<Eigen::Index>(col ^ p.x_mask()));
  }
  return out;
}

Matrix left_multiply(const PauliString& p, const Matrix& u) {
  const Eigen::Index dim = u.rows();
  if (dim != (Eigen::Index{1} << p.n_sites())) {
    throw DimensionError("operator dimension does not match Pauli word");
  }
  // (P U)[r ^ x, :] = phase(r) U[r, :]
  Matrix out(dim, u.cols());
  for (Eigen::Index r = 0; r < dim; ++r) {
    const auto row = static_cast<std::uint64_t>(r);
    out.row(static_cast<Eigen::Index>(row ^ p.x_mask())) =
        column_phase(p.x_mask(), p.z_mask(), row) * u.row(r);
  }
  return out;
}

Matrix pauli_exponential(const PauliString& p, double theta) {
  require_dense_size(p.n_sites());
  const Eigen::Index dim = Eigen::Index{1} << p.n_sites();
  return std::cos(theta) * Matrix::Identity(dim, dim) -
         kI * std::sin(theta) * pauli_matrix(p);
}

Matrix apply_pauli_exponential_right(const Matrix& u, const PauliString& p, double theta) {
  return std::cos(theta) * u - kI * std::sin(theta) * right_multiply(u, p);
}

}  // namespace mirrorchain
