#include "bsforge/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <unistd.h>
#include <zlib.h>

#include "json.hpp"

namespace bsforge {

namespace {

using nlohmann::json;

constexpr const char *kMagic = "BSFCERT\n";
constexpr const char *kLayout = "float64 little-endian, complex interleaved (re, im), row-major";

void put_double(std::string &out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  if constexpr (std::endian::native == std::endian::big) {
    bits = __builtin_bswap64(bits);
  }
  char buf[8];
  std::memcpy(buf, &bits, 8);
  out.append(buf, 8);
}

double get_double(const char *p) {
  std::uint64_t bits;
  std::memcpy(&bits, p, 8);
  if constexpr (std::endian::native == std::endian::big) {
    bits = __builtin_bswap64(bits);
  }
  return std::bit_cast<double>(bits);
}

std::uint32_t checksum(const char *data, std::size_t n) {
  uLong c = crc32(0L, Z_NULL, 0);
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1U << 30));
    c = crc32(c, reinterpret_cast<const Bytef *>(data), chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(c);
}

json symbol_json(const DispersionSymbol &s) {
  if (s.is_laplacian()) {
    return {{"kind", "laplacian"}};
  }
  if (s.is_fractional()) {
    return {{"kind", "fractional"}, {"s", s.exponent()}};
  }
  return {{"kind", "tabulated"}};
}

json region_json(const RegionSpec &r) {
  return {{"shape", r.shape == RegionShape::tube ? "tube" : "ball"},
          {"eps", r.eps},
          {"M", r.M},
          {"center", r.center},
          {"axis", r.axis},
          {"axial_scale", r.axial_scale},
          {"transverse_scale", r.transverse_scale}};
}

RegionSpec region_from(const json &j) {
  RegionSpec r;
  const auto shape = j.at("shape").get<std::string>();
  if (shape != "tube" && shape != "ball") {
    throw std::runtime_error("certificate region has unknown shape '" + shape + "'");
  }
  r.shape = shape == "tube" ? RegionShape::tube : RegionShape::ball;
  r.eps = j.at("eps").get<double>();
  r.M = j.at("M").get<double>();
  r.center = j.at("center").get<std::vector<double>>();
  r.axis = j.at("axis").get<std::vector<double>>();
  r.axial_scale = j.at("axial_scale").get<double>();
  r.transverse_scale = j.at("transverse_scale").get<double>();
  return r;
}

void append_field(std::string &payload, const Field &f) {
  for (const auto &v : f.values()) {
    put_double(payload, v.real());
    put_double(payload, v.imag());
  }
}

Field read_field(const GridPtr &grid, const char *p) {
  Field f(grid);
  for (std::size_t k = 0; k < f.size(); ++k) {
    f[k] = cplx(get_double(p + 16 * k), get_double(p + 16 * k + 8));
  }
  return f;
}

} // namespace

std::string encode_certificate(const Certificate &cert) {
  const auto &g = cert.grid();
  std::string payload;
  const std::size_t n = g.point_count();
  payload.reserve(3 * 16 * n + 8 * n);
  json arrays = json::array();
  std::size_t offset = 0;
  for (const auto &[name, field] :
       {std::pair<const char *, const Field *>{"phi", &cert.phi}, {"psi", &cert.psi},
        {"V", &cert.V}}) {
    append_field(payload, *field);
    arrays.push_back({{"name", name}, {"offset", offset}, {"count", 2 * n}});
    offset += 16 * n;
  }
  json sym = symbol_json(cert.symbol);
  if (cert.symbol.is_tabulated()) {
    const auto &tab = cert.symbol.table();
    require_same_grid(*tab.grid, g, "tabulated symbol serialization");
    for (double v : tab.values) {
      put_double(payload, v);
    }
    arrays.push_back({{"name", "symbol"}, {"offset", offset}, {"count", n}});
    offset += 8 * n;
  }
  json q = json::array();
  for (const auto &[k, v] : cert.q_norms) {
    q.push_back({k, v});
  }
  json header = {{"version", kCertificateVersion},
                 {"layout", kLayout},
                 {"grid", {{"dimension", g.dimension()}, {"box_lengths", g.box_lengths()},
                           {"sizes", g.sizes()}}},
                 {"symbol", sym},
                 {"lambda", cert.lambda},
                 {"eps", cert.eps},
                 {"z", {cert.z.real(), cert.z.imag()}},
                 {"region", region_json(cert.region)},
                 {"mu", cert.mu},
                 {"residual", cert.residual},
                 {"nodal_fraction", cert.nodal_fraction},
                 {"tau", cert.tau},
                 {"eigen_residual", cert.eigen_residual},
                 {"iterations", cert.iterations},
                 {"q_norms", q},
                 {"arrays", arrays},
                 {"payload_bytes", payload.size()},
                 {"crc32", checksum(payload.data(), payload.size())}};
  const std::string h = header.dump();
  std::string out = kMagic;
  out += std::to_string(h.size());
  out += '\n';
  out += h;
  out += payload;
  return out;
}

Certificate decode_certificate(const std::string &bytes) {
  const std::size_t mlen = std::strlen(kMagic);
  if (bytes.compare(0, mlen, kMagic) != 0) {
    throw std::runtime_error("not a certificate file (bad magic)");
  }
  const auto nl = bytes.find('\n', mlen);
  if (nl == std::string::npos) {
    throw std::runtime_error("certificate header length missing (truncated file)");
  }
  std::size_t hlen = 0;
  try {
    hlen = std::stoull(bytes.substr(mlen, nl - mlen));
  } catch (const std::exception &) {
    throw std::runtime_error("certificate header length unreadable");
  }
  if (nl + 1 + hlen > bytes.size()) {
    throw std::runtime_error("certificate header truncated");
  }
  json h;
  try {
    h = json::parse(bytes.substr(nl + 1, hlen));
  } catch (const json::exception &e) {
    throw std::runtime_error(std::string("certificate header corrupt: ") + e.what());
  }
  const int version = h.value("version", -1);
  if (version != kCertificateVersion) {
    throw std::runtime_error("unsupported certificate version " + std::to_string(version) +
                             " (this build reads version " +
                             std::to_string(kCertificateVersion) + ")");
  }
  if (h.value("layout", std::string{}) != kLayout) {
    throw std::runtime_error("unsupported certificate array layout");
  }
  const char *payload = bytes.data() + nl + 1 + hlen;
  const std::size_t available = bytes.size() - (nl + 1 + hlen);
  const auto expected = h.at("payload_bytes").get<std::size_t>();
  if (available != expected ||
      checksum(payload, available) != h.at("crc32").get<std::uint32_t>()) {
    throw std::runtime_error("certificate checksum mismatch (file truncated or corrupted)");
  }

  const auto &gj = h.at("grid");
  const GridPtr grid = build_grid(gj.at("dimension").get<int>(),
                                  gj.at("box_lengths").get<std::vector<double>>(),
                                  gj.at("sizes").get<std::vector<int>>());
  const std::size_t n = grid->point_count();
  std::map<std::string, std::size_t> offsets;
  for (const auto &a : h.at("arrays")) {
    const auto off = a.at("offset").get<std::size_t>();
    const auto count = a.at("count").get<std::size_t>();
    if (off + 8 * count > available) {
      throw std::runtime_error("certificate array exceeds the payload");
    }
    offsets[a.at("name").get<std::string>()] = off;
  }
  for (const char *name : {"phi", "psi", "V"}) {
    if (!offsets.contains(name)) {
      throw std::runtime_error(std::string("certificate lacks array ") + name);
    }
  }

  Certificate c;
  const auto &sj = h.at("symbol");
  const auto kind = sj.at("kind").get<std::string>();
  if (kind == "laplacian") {
    c.symbol = DispersionSymbol::laplacian();
  } else if (kind == "fractional") {
    c.symbol = DispersionSymbol::fractional(sj.at("s").get<double>());
  } else if (kind == "tabulated") {
    if (!offsets.contains("symbol")) {
      throw std::runtime_error("tabulated certificate lacks symbol values");
    }
    std::vector<double> vals(n);
    for (std::size_t k = 0; k < n; ++k) {
      vals[k] = get_double(payload + offsets["symbol"] + 8 * k);
    }
    c.symbol = DispersionSymbol::tabulated(grid, std::move(vals));
  } else {
    throw std::runtime_error("certificate symbol has unknown kind '" + kind + "'");
  }
  c.lambda = h.at("lambda").get<double>();
  c.eps = h.at("eps").get<double>();
  const auto zz = h.at("z").get<std::vector<double>>();
  c.z = cplx(zz.at(0), zz.at(1));
  c.region = region_from(h.at("region"));
  c.mu = h.at("mu").get<double>();
  c.residual = h.at("residual").get<double>();
  c.nodal_fraction = h.at("nodal_fraction").get<double>();
  c.tau = h.at("tau").get<double>();
  c.eigen_residual = h.at("eigen_residual").get<double>();
  c.iterations = h.at("iterations").get<int>();
  for (const auto &p : h.at("q_norms")) {
    c.q_norms[p.at(0).get<double>()] = p.at(1).get<double>();
  }
  c.phi = read_field(grid, payload + offsets["phi"]);
  c.psi = read_field(grid, payload + offsets["psi"]);
  c.V = read_field(grid, payload + offsets["V"]);
  return c;
}

void write_atomic(const std::string &path, const std::string &contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path());
  }
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  fs::rename(tmp, target);
}

void save_certificate(const Certificate &cert, const std::string &path) {
  write_atomic(path, encode_certificate(cert));
}

Certificate load_certificate(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open certificate " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_certificate(ss.str());
}

std::string report_json(const VerifyReport &rep) {
  json q = json::object();
  for (const auto &[k, v] : rep.q_norms) {
    q[std::to_string(k)] = v;
  }
  return json{{"passed", rep.passed},
              {"residual", rep.residual},
              {"tol", rep.tol},
              {"pointwise_bound", rep.pointwise_bound},
              {"support", rep.support},
              {"norm_bounds", rep.norm_bounds},
              {"q_norms", q},
              {"failures", rep.failures}}
      .dump(2);
}

std::string report_json(const BoundReport &rep) {
  return json{{"name", rep.name},
              {"lhs", rep.lhs},
              {"rhs", rep.rhs},
              {"ratio", rep.ratio},
              {"parameters", rep.parameters}}
      .dump(2);
}

std::string report_json(const DecayProfile &prof) {
  return json{{"radii", prof.radii},
              {"envelope", prof.envelope},
              {"fitted_exponent", prof.fitted_exponent},
              {"intercept", prof.intercept},
              {"fit_range", {prof.r_min, prof.r_max}},
              {"r_squared", prof.r_squared},
              {"suppression_ratio", prof.suppression_ratio}}
      .dump(2);
}

} // namespace bsforge
