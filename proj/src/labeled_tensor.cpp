#include "osgap/labeled_tensor.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace osgap {

std::string to_string(FactorKind kind) {
  switch (kind) {
    case FactorKind::RowVec: return "RowVec";
    case FactorKind::ColVec: return "ColVec";
    case FactorKind::TraceClass: return "TraceClass";
    case FactorKind::FullOperator: return "FullOperator";
    case FactorKind::DiagL1: return "DiagL1";
    case FactorKind::DiagLinf: return "DiagLinf";
  }
  return "?";
}

FactorKind factor_kind_from_string(const std::string& s) {
  for (auto k : {FactorKind::RowVec, FactorKind::ColVec, FactorKind::TraceClass,
                 FactorKind::FullOperator, FactorKind::DiagL1, FactorKind::DiagLinf})
    if (to_string(k) == s) return k;
  throw DomainError("unknown factor kind '" + s + "'");
}

FactorSpec FactorSpec::make(FactorKind kind, int dim) {
  if (dim < 1) throw DomainError("factor dimension must be positive");
  FactorSpec f;
  f.kind = kind;
  f.dim = dim;
  if (!f.is_matrix()) f.shape = {dim};
  return f;
}

FactorSpec FactorSpec::make(FactorKind kind, std::vector<int> shape) {
  FactorSpec f;
  f.kind = kind;
  if (f.is_matrix()) {
    if (shape.size() != 1) throw DomainError("matrix legs take a single side length");
    return make(kind, shape[0]);
  }
  if (shape.empty()) throw DomainError("vector legs need a nonempty shape");
  long long d = 1;
  for (int e : shape) {
    if (e < 1) throw DomainError("factor shape extents must be positive");
    d *= e;
  }
  f.dim = static_cast<int>(d);
  f.shape = std::move(shape);
  return f;
}

FactorKind dual_kind(FactorKind kind) {
  switch (kind) {
    case FactorKind::RowVec: return FactorKind::ColVec;
    case FactorKind::ColVec: return FactorKind::RowVec;
    case FactorKind::TraceClass: return FactorKind::FullOperator;
    case FactorKind::FullOperator: return FactorKind::TraceClass;
    case FactorKind::DiagL1: return FactorKind::DiagLinf;
    case FactorKind::DiagLinf: return FactorKind::DiagL1;
  }
  return kind;
}

bool dual_compatible(const FactorSpec& a, const FactorSpec& b) {
  return b.kind == dual_kind(a.kind) && a.dim == b.dim && a.shape == b.shape;
}

LabeledTensor::LabeledTensor(std::vector<FactorSpec> factors) : factors_(std::move(factors)) {
  arity_ = 0;
  for (const auto& f : factors_) arity_ += f.arity();
}

int LabeledTensor::offset(int position) const {
  if (position < 0 || position >= static_cast<int>(factors_.size()))
    throw DomainError("factor position out of range");
  int off = 0;
  for (int i = 0; i < position; ++i) off += factors_[static_cast<size_t>(i)].arity();
  return off;
}

void LabeledTensor::check_index(const Index& idx) const {
  if (static_cast<int>(idx.size()) != arity_) throw DomainError("index arity does not match legs");
  size_t c = 0;
  for (const auto& f : factors_) {
    for (int j = 0; j < f.arity(); ++j, ++c) {
      if (idx[c] < 0 || idx[c] >= f.extent(j)) throw DomainError("index outside declared dims");
    }
  }
}

LabeledTensor LabeledTensor::from_terms(std::vector<FactorSpec> factors, std::vector<Term> terms) {
  LabeledTensor t(std::move(factors));
  std::stable_sort(terms.begin(), terms.end(),
                   [](const Term& a, const Term& b) { return a.first < b.first; });
  for (size_t i = 0; i < terms.size();) {
    size_t j = i;
    Complex sum = 0.0;
    while (j < terms.size() && terms[j].first == terms[i].first) sum += terms[j++].second;
    t.check_index(terms[i].first);
    if (std::abs(sum) > tol::kPrune) t.entries_.emplace_hint(t.entries_.end(), terms[i].first, sum);
    i = j;
  }
  return t;
}

Complex LabeledTensor::at(const Index& idx) const {
  auto it = entries_.find(idx);
  return it == entries_.end() ? Complex(0.0) : it->second;
}

LabeledTensor LabeledTensor::scaled(Complex s) const {
  std::vector<Term> terms(entries_.begin(), entries_.end());
  for (auto& [idx, v] : terms) v *= s;
  return from_terms(factors_, std::move(terms));
}

Complex pair(const LabeledTensor& t, const LabeledTensor& s) {
  const auto& ft = t.factors();
  const auto& fs = s.factors();
  if (ft.size() != fs.size()) throw DomainError("pair: leg counts differ");
  for (size_t i = 0; i < ft.size(); ++i)
    if (!dual_compatible(ft[i], fs[i]))
      throw DomainError("pair: leg " + std::to_string(i) + " is not dual-compatible (" +
                        to_string(ft[i].kind) + " vs " + to_string(fs[i].kind) + ")");

  Complex sum = 0.0;
  const auto& small = t.nnz() <= s.nnz() ? t.entries() : s.entries();
  const auto& large = t.nnz() <= s.nnz() ? s.entries() : t.entries();
  for (const auto& [idx, v] : small) {
    auto it = large.find(idx);
    if (it != large.end()) sum += v * it->second;
  }
  return sum;
}

std::vector<int> inverse_permutation(std::span<const int> perm) {
  std::vector<int> inv(perm.size());
  for (size_t i = 0; i < perm.size(); ++i) inv[static_cast<size_t>(perm[i])] = static_cast<int>(i);
  return inv;
}

LabeledTensor swap_factors(const LabeledTensor& t, std::span<const int> perm) {
  const size_t m = t.factors().size();
  if (perm.size() != m) throw DomainError("swap_factors: permutation length mismatch");
  std::vector<bool> seen(m, false);
  for (int p : perm) {
    if (p < 0 || static_cast<size_t>(p) >= m || seen[static_cast<size_t>(p)])
      throw DomainError("swap_factors: not a permutation");
    seen[static_cast<size_t>(p)] = true;
  }

  std::vector<FactorSpec> out_factors;
  std::vector<int> src_offset;
  for (int p : perm) {
    out_factors.push_back(t.factors()[static_cast<size_t>(p)]);
    src_offset.push_back(t.offset(p));
  }

  std::vector<LabeledTensor::Term> terms;
  terms.reserve(t.nnz());
  for (const auto& [idx, v] : t.entries()) {
    Index out;
    out.reserve(idx.size());
    for (size_t i = 0; i < m; ++i) {
      const int a = out_factors[i].arity();
      for (int c = 0; c < a; ++c) out.push_back(idx[static_cast<size_t>(src_offset[i] + c)]);
    }
    terms.emplace_back(std::move(out), v);
  }
  return LabeledTensor::from_terms(std::move(out_factors), std::move(terms));
}

LabeledTensor transpose_tail(const LabeledTensor& t) {
  const int m = static_cast<int>(t.factors().size());
  if (m < 2) throw DomainError("transpose_tail: need at least two legs");
  std::vector<int> perm(static_cast<size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  std::swap(perm[static_cast<size_t>(m - 2)], perm[static_cast<size_t>(m - 1)]);
  return swap_factors(t, perm);
}

LabeledTensor apply_factorwise(const LabeledTensor& t, int position, const FactorMap& map) {
  const int off = t.offset(position);
  const FactorSpec& leg = t.factors()[static_cast<size_t>(position)];
  if (!(leg == map.input)) throw DomainError("apply_factorwise: map input does not match leg");

  std::vector<FactorSpec> out_factors;
  for (int i = 0; i < static_cast<int>(t.factors().size()); ++i) {
    if (i == position)
      out_factors.insert(out_factors.end(), map.outputs.begin(), map.outputs.end());
    else
      out_factors.push_back(t.factors()[static_cast<size_t>(i)]);
  }

  std::map<Index, LabeledTensor> cache;
  std::vector<LabeledTensor::Term> terms;
  const int a = leg.arity();
  for (const auto& [idx, v] : t.entries()) {
    Index basis(idx.begin() + off, idx.begin() + off + a);
    auto it = cache.find(basis);
    if (it == cache.end()) {
      LabeledTensor img = map.image(basis);
      if (img.factors() != map.outputs) throw DomainError("apply_factorwise: image legs mismatch");
      it = cache.emplace(basis, std::move(img)).first;
    }
    for (const auto& [fidx, fv] : it->second.entries()) {
      Index out(idx.begin(), idx.begin() + off);
      out.insert(out.end(), fidx.begin(), fidx.end());
      out.insert(out.end(), idx.begin() + off + a, idx.end());
      terms.emplace_back(std::move(out), v * fv);
    }
  }
  return LabeledTensor::from_terms(std::move(out_factors), std::move(terms));
}

void write_sparse(std::ostream& out, const LabeledTensor& t) {
  out << "osgap-sparse 1\n";
  out << "factors " << t.factors().size() << "\n";
  for (const auto& f : t.factors()) {
    out << to_string(f.kind) << ' ' << f.dim;
    if (!f.is_matrix())
      for (int e : f.shape) out << ' ' << e;
    out << "\n";
  }
  out << "entries " << t.nnz() << "\n";
  char buf[64];
  for (const auto& [idx, v] : t.entries()) {
    for (int c : idx) out << c << ' ';
    std::snprintf(buf, sizeof buf, "%.17g %.17g", v.real(), v.imag());
    out << buf << "\n";
  }
}

LabeledTensor read_sparse(std::istream& in) {
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "osgap-sparse" || version != 1)
    throw DomainError("read_sparse: missing 'osgap-sparse 1' header");
  size_t nf = 0;
  if (!(in >> tag >> nf) || tag != "factors") throw DomainError("read_sparse: bad factors line");
  in.ignore(1 << 20, '\n');

  std::vector<FactorSpec> factors;
  for (size_t i = 0; i < nf; ++i) {
    std::string line;
    if (!std::getline(in, line)) throw DomainError("read_sparse: truncated factor list");
    std::istringstream ls(line);
    std::string kind;
    int dim = 0;
    ls >> kind >> dim;
    FactorKind k = factor_kind_from_string(kind);
    std::vector<int> shape;
    for (int e; ls >> e;) shape.push_back(e);
    FactorSpec f = shape.empty() ? FactorSpec::make(k, dim) : FactorSpec::make(k, shape);
    if (f.dim != dim) throw DomainError("read_sparse: shape does not multiply to dim");
    factors.push_back(std::move(f));
  }

  size_t ne = 0;
  if (!(in >> tag >> ne) || tag != "entries") throw DomainError("read_sparse: bad entries line");
  int arity = 0;
  for (const auto& f : factors) arity += f.arity();

  std::vector<LabeledTensor::Term> terms;
  terms.reserve(ne);
  for (size_t e = 0; e < ne; ++e) {
    Index idx(static_cast<size_t>(arity));
    for (auto& c : idx)
      if (!(in >> c)) throw DomainError("read_sparse: truncated entry");
    double re = 0, im = 0;
    if (!(in >> re >> im)) throw DomainError("read_sparse: truncated entry");
    terms.emplace_back(std::move(idx), Complex(re, im));
  }
  return LabeledTensor::from_terms(std::move(factors), std::move(terms));
}

}  // namespace osgap
