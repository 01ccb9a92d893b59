#include "collapse/lie_complex.hpp"

#include "collapse/csv.hpp"
#include "collapse/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace collapse::lie {

namespace {

std::size_t index(int n, int i, int j, int k) {
  return (static_cast<std::size_t>(i) * n + j) * n + k;
}

std::vector<double> tensor_from_entries(int n, const std::vector<BracketEntry>& entries) {
  if (n < 1 || n > 16) throw Error("algebra dimension must lie in [1, 16]");
  std::vector<double> c(static_cast<std::size_t>(n) * n * n, 0.0);
  for (const auto& e : entries) {
    if (e.i < 0 || e.j < 0 || e.k < 0 || e.i >= n || e.j >= n || e.k >= n)
      throw Error("bracket index out of range");
    if (e.i == e.j) throw Error("bracket [e_i, e_i] must vanish");
    c[index(n, e.i, e.j, e.k)] = e.value;
    c[index(n, e.j, e.i, e.k)] = -e.value;
  }
  return c;
}

int inversions(const int* seq, int len) {
  int inv = 0;
  for (int a = 0; a < len; ++a)
    for (int b = a + 1; b < len; ++b)
      if (seq[a] > seq[b]) ++inv;
  return inv;
}

struct Term {
  int a, b;
  double coeff;  // coefficient of ξ^a∧ξ^b in dξ^m, a < b
};

}  // namespace

StructureConstants::StructureConstants(int n)
    : StructureConstants(n, std::vector<BracketEntry>{}) {}

StructureConstants::StructureConstants(int n, const std::vector<BracketEntry>& entries,
                                       double jacobi_tol)
    : n_(n), c_(tensor_from_entries(n, entries)) {
  check_jacobi(jacobi_tol);
}

StructureConstants StructureConstants::from_tensor(int n, std::vector<double> c,
                                                   double jacobi_tol) {
  if (n < 1 || n > 16) throw Error("algebra dimension must lie in [1, 16]");
  if (c.size() != static_cast<std::size_t>(n) * n * n) throw Error("tensor has wrong size");
  double scale = 0.0;
  for (double x : c) scale = std::max(scale, std::abs(x));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (std::abs(c[index(n, i, j, k)] + c[index(n, j, i, k)]) > 1e-14 * std::max(1.0, scale))
          throw Error("structure constants are not antisymmetric");
  StructureConstants L(n, std::move(c));
  L.check_jacobi(jacobi_tol);
  return L;
}

StructureConstants StructureConstants::unchecked(int n, const std::vector<BracketEntry>& entries) {
  return StructureConstants(n, tensor_from_entries(n, entries));
}

void StructureConstants::check_jacobi(double tol) const {
  double scale = std::max(1.0, max_abs());
  double defect = jacobi_defect(*this);
  if (defect > tol * scale * scale) {
    std::ostringstream os;
    os << "Jacobi identity fails (defect " << defect << ")";
    throw NotLieAlgebra(os.str());
  }
}

double StructureConstants::max_abs() const noexcept {
  double m = 0.0;
  for (double x : c_) m = std::max(m, std::abs(x));
  return m;
}

std::vector<BracketEntry> StructureConstants::entries() const {
  std::vector<BracketEntry> out;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        if ((*this)(i, j, k) != 0.0) out.push_back({i, j, k, (*this)(i, j, k)});
  return out;
}

StructureConstants parse_structure_constants(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int n = -1;
  std::vector<BracketEntry> entries;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    auto fail = [&](const char* what) {
      throw ParseError("line " + std::to_string(lineno) + ": " + what);
    };
    std::string eq;
    if (head == "n") {
      if (!(ls >> eq >> n) || eq != "=" || n < 1) fail("expected 'n = <dim>'");
    } else if (head == "c") {
      BracketEntry e{};
      if (!(ls >> e.i >> e.j >> e.k >> eq >> e.value) || eq != "=") fail("expected 'c i j k = <value>'");
      if (n < 0) fail("'n = <dim>' must come first");
      if (e.i >= e.j) fail("entries need i < j");
      if (e.i < 1 || e.k < 1 || e.j > n || e.k > n) fail("index out of range");
      --e.i, --e.j, --e.k;
      entries.push_back(e);
    } else {
      fail("unknown directive");
    }
    std::string rest;
    if (ls >> rest) fail("trailing characters");
  }
  if (n < 0) throw ParseError("missing 'n = <dim>'");
  return StructureConstants(n, entries);
}

std::string to_text(const StructureConstants& L) {
  std::string out = "n = " + std::to_string(L.dim()) + "\n";
  for (const auto& e : L.entries())
    out += "c " + std::to_string(e.i + 1) + " " + std::to_string(e.j + 1) + " " +
           std::to_string(e.k + 1) + " = " + csv::number(e.value) + "\n";
  return out;
}

double jacobi_defect(const StructureConstants& L) {
  const int n = L.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        for (int m = 0; m < n; ++m) {
          double s = 0.0;
          for (int l = 0; l < n; ++l)
            s += L(i, j, l) * L(l, k, m) + L(j, k, l) * L(l, i, m) + L(k, i, l) * L(l, j, m);
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

double unimodularity_defect(const StructureConstants& L) {
  double worst = 0.0;
  for (int j = 0; j < L.dim(); ++j) {
    double tr = 0.0;
    for (int k = 0; k < L.dim(); ++k) tr += L(j, k, k);
    worst = std::max(worst, std::abs(tr));
  }
  return worst;
}

StructureConstants change_frame(const StructureConstants& L, const Matrix& P) {
  const int n = L.dim();
  if (P.rows() != n || P.cols() != n) throw SingularFrame("frame matrix has wrong shape");
  Eigen::FullPivLU<Matrix> lu(P);
  if (!lu.isInvertible() || lu.rcond() < 1e-14) throw SingularFrame("frame matrix is singular");
  Matrix Pinv = lu.inverse();

  std::vector<Matrix> W(n);
  for (int k = 0; k < n; ++k) {
    Matrix Ck(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) Ck(i, j) = L(i, j, k);
    W[k] = P.transpose() * Ck * P;
  }
  std::vector<BracketEntry> entries;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int m = 0; m < n; ++m) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += Pinv(m, k) * W[k](a, b);
        if (s != 0.0) entries.push_back({a, b, m, s});
      }
  // A frame change of a Lie algebra is a Lie algebra; the check would only
  // see roundoff amplified by the conditioning of P.
  return StructureConstants::unchecked(n, entries);
}

StructureConstants direct_sum(const StructureConstants& a, const StructureConstants& b) {
  std::vector<BracketEntry> entries = a.entries();
  for (auto e : b.entries()) {
    e.i += a.dim(), e.j += a.dim(), e.k += a.dim();
    entries.push_back(e);
  }
  return StructureConstants::unchecked(a.dim() + b.dim(), entries);
}

FormBasis::FormBasis(int n, int p) : n_(n), p_(p) {
  if (n < 0 || n > 16) throw Error("form basis dimension must lie in [0, 16]");
  if (p < 0 || p > n) throw DegreeOutOfRange("degree " + std::to_string(p) + " outside [0, " +
                                             std::to_string(n) + "]");
  rank_.assign(std::size_t{1} << n, -1);
  std::vector<int> t(p);
  for (int i = 0; i < p; ++i) t[i] = i;
  while (true) {
    std::uint32_t m = 0;
    for (int x : t) m |= 1u << x;
    rank_[m] = static_cast<int>(masks_.size());
    masks_.push_back(m);
    int i = p - 1;
    while (i >= 0 && t[i] == n - p + i) --i;
    if (i < 0) break;
    ++t[i];
    for (int j = i + 1; j < p; ++j) t[j] = t[j - 1] + 1;
  }
}

std::vector<int> FormBasis::tuple(int r) const {
  std::vector<int> t;
  for (std::uint32_t m = masks_[r]; m; m &= m - 1) t.push_back(std::countr_zero(m));
  return t;
}

int FormBasis::rank_of(std::uint32_t mask) const {
  if (mask >= rank_.size()) return -1;
  return rank_[mask];
}

std::string FormBasis::label(int r) const {
  std::string s;
  for (int i : tuple(r)) {
    if (!s.empty() && n_ > 9) s += '.';
    s += std::to_string(i + 1);
  }
  return s.empty() ? "1" : s;
}

Matrix exterior_derivative(const StructureConstants& L, int p, Exec exec) {
  const int n = L.dim();
  if (p < 0 || p > n) throw DegreeOutOfRange("degree " + std::to_string(p) + " outside [0, " +
                                             std::to_string(n) + "]");
  FormBasis src(n, p);
  if (p == n) return Matrix::Zero(0, src.size());
  FormBasis dst(n, p + 1);

  std::vector<std::vector<Term>> dxi(n);
  for (int m = 0; m < n; ++m)
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (double c = L(a, b, m); c != 0.0) dxi[m].push_back({a, b, -c});

  Matrix D = Matrix::Zero(dst.size(), src.size());
  const int cols = src.size();

  auto column = [&](int r) {
    const std::uint32_t I = src.mask(r);
    const std::vector<int> t = src.tuple(r);
    int seq[17];
    for (int s = 0; s < p; ++s) {
      const int m = t[s];
      const std::uint32_t rest = I & ~(1u << m);
      const double sign = (s % 2 == 0) ? 1.0 : -1.0;
      for (const Term& term : dxi[m]) {
        const std::uint32_t ab = (1u << term.a) | (1u << term.b);
        if (rest & ab) continue;
        int len = 0;
        for (int q = 0; q < s; ++q) seq[len++] = t[q];
        seq[len++] = term.a;
        seq[len++] = term.b;
        for (int q = s + 1; q < p; ++q) seq[len++] = t[q];
        const double parity = (inversions(seq, len) % 2 == 0) ? 1.0 : -1.0;
        D(dst.rank_of(rest | ab), r) += sign * parity * term.coeff;
      }
    }
  };

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (int r = 0; r < cols; ++r) column(r);
  } else {
    for (int r = 0; r < cols; ++r) column(r);
  }
  return D;
}

Matrix codifferential(const StructureConstants& L, int p) {
  if (p < 1 || p > L.dim())
    throw DegreeOutOfRange("codifferential degree " + std::to_string(p) + " outside [1, " +
                           std::to_string(L.dim()) + "]");
  return exterior_derivative(L, p - 1).transpose();
}

Matrix laplacian(const StructureConstants& L, int p) {
  const int n = L.dim();
  if (p < 0 || p > n) throw DegreeOutOfRange("degree " + std::to_string(p) + " outside [0, " +
                                             std::to_string(n) + "]");
  Matrix dp = exterior_derivative(L, p);
  Matrix out = dp.transpose() * dp;
  if (p > 0) {
    Matrix dm = exterior_derivative(L, p - 1);
    out += dm * dm.transpose();
  }
  return out;
}

std::vector<double> SpectrumReport::nonzero() const {
  return {eigenvalues.begin() + kernel_dim, eigenvalues.end()};
}

double SpectrumReport::smallest_nonzero() const {
  return kernel_dim < static_cast<int>(eigenvalues.size())
             ? eigenvalues[kernel_dim]
             : std::numeric_limits<double>::infinity();
}

SpectrumReport spectrum_of(std::vector<double> ev) {
  std::sort(ev.begin(), ev.end());
  SpectrumReport rep;
  for (double& x : ev) {
    if (x < -kEigTol) throw Error("operator is not positive semidefinite");
    if (x <= kEigTol) {
      x = 0.0;
      ++rep.kernel_dim;
    }
  }
  if (rep.kernel_dim > 0) rep.groups.push_back({0.0, rep.kernel_dim});
  for (std::size_t i = rep.kernel_dim; i < ev.size();) {
    std::size_t j = i + 1;
    double sum = ev[i];
    while (j < ev.size() && ev[j] - ev[j - 1] <= kGroupingTol * ev[j]) sum += ev[j++];
    rep.groups.push_back({sum / static_cast<double>(j - i), static_cast<int>(j - i)});
    i = j;
  }
  rep.eigenvalues = std::move(ev);
  return rep;
}

SpectrumReport spectrum_of(const Matrix& sym) {
  if (sym.rows() != sym.cols()) throw NotSymmetric("matrix is not square");
  if (max_abs(sym - sym.transpose()) > kSymTol * std::max(1.0, max_abs(sym)))
    throw NotSymmetric("matrix is not symmetric");
  return spectrum_of(symmetric_eigenvalues(sym));
}

SpectrumReport spectrum(const StructureConstants& L, int p) {
  return spectrum_of(laplacian(L, p));
}

StructureConstants abelian(int n) { return StructureConstants(n); }

StructureConstants heisenberg() { return StructureConstants(3, std::vector<BracketEntry>{{0, 1, 2, 1.0}}); }

}  // namespace collapse::lie
