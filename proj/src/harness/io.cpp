#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "nsaudit/errors.hpp"
#include "nsaudit/harness.hpp"

namespace nsaudit::harness {

namespace {

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void bytes(const std::string& s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
  void save(const fs::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    if (!out) throw ConfigError("write failed for '" + path.string() + "'");
  }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  explicit Reader(const fs::path& path) : name_(path.string()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + name_ + "'");
    buf_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  std::size_t size() const { return buf_.size(); }
  std::size_t remaining() const { return buf_.size() - pos_; }
  void need(std::size_t n) const {
    if (remaining() < n) throw ConfigError("'" + name_ + "' is truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s(buf_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::vector<char> buf_;
  std::size_t pos_ = 0;
};

std::string g17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::uintmax_t snapshot_bytes(int n, int ncomp) {
  const std::uintmax_t n3 = std::uintmax_t(n) * n * n;
  return 4 + 4 + 4 + 8 + 8 + 4 + 8 * std::uintmax_t(ncomp) * n3;
}

void save_snapshot(const Snapshot& s, const fs::path& path) {
  const std::size_t n3 = std::size_t(s.n) * s.n * s.n;
  for (const auto& c : s.comps)
    if (c.size() != n3) throw InvalidInput("snapshot component has the wrong length");
  Writer w;
  w.bytes("NSFS");
  w.u32(1);
  w.u32(static_cast<std::uint32_t>(s.n));
  w.f64(s.length);
  w.f64(s.t);
  w.u32(static_cast<std::uint32_t>(s.comps.size()));
  for (const auto& c : s.comps)
    for (double v : c) w.f64(v);
  w.save(path);
}

Snapshot load_snapshot(const fs::path& path) {
  Reader r(path);
  if (r.size() < 32 || r.bytes(4) != "NSFS") throw ConfigError("'" + r.name() + "' is not an NSFS snapshot");
  const auto version = r.u32();
  if (version != 1) throw ConfigError("'" + r.name() + "' has unsupported version " + std::to_string(version));
  Snapshot s;
  s.n = static_cast<int>(r.u32());
  s.length = r.f64();
  s.t = r.f64();
  const auto ncomp = r.u32();
  if (s.n <= 0 || ncomp == 0 || ncomp > 16) throw ConfigError("'" + r.name() + "' has a bad header");
  const auto expect = snapshot_bytes(s.n, static_cast<int>(ncomp));
  if (r.size() < expect) throw ConfigError("'" + r.name() + "' is truncated");
  if (r.size() > expect) throw ConfigError("'" + r.name() + "' has trailing bytes");
  const std::size_t n3 = std::size_t(s.n) * s.n * s.n;
  s.comps.assign(ncomp, std::vector<double>(n3));
  for (auto& c : s.comps)
    for (auto& v : c) v = r.f64();
  return s;
}

Snapshot snapshot_of(const flow::FlowState& st) {
  const auto v = spectral::to_physical(st.u);
  Snapshot s;
  s.n = st.grid().n();
  s.length = st.grid().length();
  s.t = st.t;
  for (int i = 0; i < 3; ++i) s.comps.push_back(v.comp[i]);
  return s;
}

flow::FlowState flow_of(const Snapshot& s) {
  if (s.comps.size() != 3) throw ConfigError("velocity snapshot needs 3 components");
  const Grid3 g = s.grid();
  spectral::VectorField v(g);
  for (int i = 0; i < 3; ++i) v.comp[i] = s.comps[i];
  return {s.t, spectral::to_spectral(v)};
}

scatter::PotentialSample potential_of(const Snapshot& s, const std::string& id) {
  if (s.comps.size() != 1) throw ConfigError("potential snapshot needs exactly 1 component");
  return scatter::PotentialSample(spectral::ScalarField(s.grid(), s.comps[0]), id);
}

void save_table(const scatter::AmplitudeTable& A, const fs::path& path) {
  Writer w;
  w.bytes("NSAT");
  w.u32(1);
  w.u32(static_cast<std::uint32_t>(A.nk()));
  w.u32(static_cast<std::uint32_t>(A.ns()));
  w.u32(static_cast<std::uint32_t>(A.born_order));
  w.u32(static_cast<std::uint32_t>(A.potential_id.size()));
  w.bytes(A.potential_id);
  for (double k : A.k) w.f64(k);
  for (const auto& n : A.sphere.nodes)
    for (double x : n) w.f64(x);
  for (double x : A.sphere.weights) w.f64(x);
  for (const auto& v : A.values) {
    w.f64(v.real());
    w.f64(v.imag());
  }
  w.save(path);
}

scatter::AmplitudeTable load_table(const fs::path& path) {
  Reader r(path);
  if (r.size() < 24 || r.bytes(4) != "NSAT") throw ConfigError("'" + r.name() + "' is not an amplitude table");
  if (r.u32() != 1) throw ConfigError("'" + r.name() + "' has an unsupported version");
  const std::size_t nk = r.u32(), ns = r.u32();
  const int order = static_cast<int>(r.u32());
  const std::size_t idlen = r.u32();
  if (nk == 0 || ns == 0 || idlen > 4096) throw ConfigError("'" + r.name() + "' has a bad header");
  std::string id = r.bytes(idlen);
  const std::size_t body = 8 * (nk + 4 * ns + 2 * nk * ns * ns);
  if (r.remaining() != body)
    throw ConfigError("'" + r.name() + "' is " + (r.remaining() < body ? "truncated" : "oversized"));
  std::vector<double> k(nk);
  for (auto& v : k) v = r.f64();
  SphereRule s;
  s.nodes.resize(ns);
  s.weights.resize(ns);
  for (auto& n : s.nodes)
    for (double& x : n) x = r.f64();
  for (auto& x : s.weights) x = r.f64();
  scatter::AmplitudeTable A(std::move(k), std::move(s), order, std::move(id));
  for (auto& v : A.values) {
    const double re = r.f64();
    v = {re, r.f64()};
  }
  return A;
}

void write_report(const audit::AuditReport& r, const RunConfig& c, std::ostream& out) {
  out << report_header << "\n";
  auto margin_of = [](const audit::AuditRecord& rec, const char* id) {
    for (const auto& m : rec.margins)
      if (m.id == id) return m.margin();
    return std::nan("");
  };
  for (const auto& rec : r.records) {
    const double row[] = {rec.t,
                          rec.energy,
                          rec.dissipation,
                          rec.pressure_norm,
                          rec.mom2,
                          rec.mom4,
                          rec.sup[0],
                          rec.sup[1],
                          rec.sup[2],
                          rec.C0,
                          rec.C2,
                          rec.C4,
                          margin_of(rec, audit::ids::energy_inequality),
                          margin_of(rec, audit::ids::pressure_l2),
                          margin_of(rec, audit::ids::pressure_gradient),
                          margin_of(rec, audit::ids::sup_k0),
                          margin_of(rec, audit::ids::sup_k1),
                          margin_of(rec, audit::ids::sup_k2),
                          rec.pair_margin_min,
                          rec.duhamel_residual};
    for (std::size_t i = 0; i < std::size(row); ++i) out << (i ? "," : "") << g17(row[i]);
    out << "\n";
  }
  out << "# K=" << g17(r.constants.K) << (r.constants.contractive ? "" : " NOT-CONTRACTIVE") << "\n";
  out << "# A0=" << g17(r.constants.A0) << "\n";
  out << "# verdicts=";
  for (std::size_t i = 0; i < r.verdicts.size(); ++i)
    out << (i ? ";" : "") << r.verdicts[i].id << ":" << r.verdicts[i].label();
  out << "\n";
  for (const auto& v : r.verdicts)
    out << "# margin " << v.id << " worst=" << g17(v.worst_margin) << " count=" << v.count << "\n";
  for (const auto& [k, v] : c.entries) out << "# config " << k << " = " << v << "\n";
}

void write_report(const audit::AuditReport& r, const RunConfig& c, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write report '" + path.string() + "'");
  write_report(r, c, out);
}

}  // namespace nsaudit::harness
