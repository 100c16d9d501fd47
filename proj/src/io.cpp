#include "oldroyd/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "oldroyd/error.hpp"

namespace oldroyd {

namespace {

constexpr char magic[4] = {'O', 'L', 'D', '1'};
constexpr std::size_t header_bytes = 4 + 4 + 4 + 4 * 8;
constexpr double symmetry_tolerance = 1e-8;

template <class U>
void put_le(std::string& buf, U bits) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
  }
}

void put_u32(std::string& buf, std::uint32_t v) { put_le(buf, v); }
void put_f64(std::string& buf, double v) { put_le(buf, std::bit_cast<std::uint64_t>(v)); }

template <class U>
U get_le(const unsigned char* p) {
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(p[i]) << (8 * i);
  return bits;
}

double get_f64(const unsigned char* p) { return std::bit_cast<double>(get_le<std::uint64_t>(p)); }

int wrap(int i, int n) { return ((i % n) + n) % n; }

}  // namespace

void checkpoint_write(const State& state, const PhysParams& params, const std::string& path) {
  state.check_grid();
  const Grid& g = state.grid();
  const int n = g.n();
  const int h = n / 2;

  std::string buf;
  buf.reserve(header_bytes + 12 * g.physical_size() * 16);
  buf.append(magic, 4);
  put_u32(buf, checkpoint_version);
  put_u32(buf, static_cast<std::uint32_t>(n));
  put_f64(buf, g.box_length());
  put_f64(buf, params.mu);
  put_f64(buf, params.nu);
  put_f64(buf, state.time);

  auto put_field = [&](const SpectralField& f) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          const Complex v =
              c <= h ? f.at(a, b, c) : std::conj(f.at(wrap(-a, n), wrap(-b, n), n - c));
          put_f64(buf, v.real());
          put_f64(buf, v.imag());
        }
  };
  for (const auto& c : state.u) put_field(c);
  for (const auto& c : state.f) put_field(c);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.close();
  if (!out) throw IoError("failed writing checkpoint " + path);
}

Checkpoint checkpoint_read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path);
  const std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(raw.data());

  if (raw.size() < header_bytes) {
    throw IoError("checkpoint " + path + " is truncated (header incomplete, " +
                  std::to_string(raw.size()) + " bytes)");
  }
  if (std::memcmp(raw.data(), magic, 4) != 0) throw IoError("bad checkpoint magic in " + path);
  const auto version = get_le<std::uint32_t>(p + 4);
  if (version != checkpoint_version) {
    throw IoError("unsupported checkpoint version " + std::to_string(version) + " in " + path);
  }
  const auto n = static_cast<int>(get_le<std::uint32_t>(p + 8));
  const double box = get_f64(p + 12);
  PhysParams params{get_f64(p + 20), get_f64(p + 28)};
  const double time = get_f64(p + 36);

  const Grid g(n, box);
  params.validate();
  const std::size_t lattice = g.physical_size();
  const std::size_t expected = header_bytes + 12 * lattice * 16;
  if (raw.size() < expected) {
    throw IoError("checkpoint " + path + " is truncated: " + std::to_string(raw.size()) +
                  " of " + std::to_string(expected) + " bytes");
  }
  if (raw.size() > expected) {
    throw IoError("checkpoint " + path + " has " + std::to_string(raw.size() - expected) +
                  " trailing bytes");
  }

  const int h = n / 2;
  const unsigned char* cursor = p + header_bytes;
  auto get_field = [&](const char* name) {
    SpectralField f(g);
    std::vector<Complex> full(lattice);
    for (auto& v : full) {
      v = {get_f64(cursor), get_f64(cursor + 8)};
      cursor += 16;
    }
    auto idx = [n](int a, int b, int c) {
      return (static_cast<std::size_t>(a) * n + b) * n + c;
    };
    double scale = 0.0, defect = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          const Complex v = full[idx(a, b, c)];
          scale = std::max(scale, std::abs(v));
          defect = std::max(defect,
                            std::abs(v - std::conj(full[idx(wrap(-a, n), wrap(-b, n), wrap(-c, n))])));
          if (c <= h) f.at(a, b, c) = v;
        }
    if (!std::isfinite(scale) || defect > symmetry_tolerance * scale) {
      throw SymmetryError(std::string("checkpoint component ") + name +
                          " violates Hermitian symmetry (defect " + std::to_string(defect) +
                          ", scale " + std::to_string(scale) + ")");
    }
    return f;
  };

  static const char* names[] = {"u1",  "u2",  "u3",  "F11", "F12", "F13",
                                "F21", "F22", "F23", "F31", "F32", "F33"};
  Checkpoint cp{State::zeros(g), params};
  cp.state.time = time;
  for (int i = 0; i < 3; ++i) cp.state.u[i] = get_field(names[i]);
  for (int m = 0; m < 9; ++m) cp.state.f[m] = get_field(names[3 + m]);
  return cp;
}

std::vector<std::string> csv_header(int m_order) {
  std::vector<std::string> h{"time", "l2_u_sq", "l2_F_sq"};
  for (int j = 0; j <= m_order; ++j) h.push_back("hm_sq[" + std::to_string(j) + "]");
  for (const char* s : {"dissipation_u", "damping_F", "shell_mass_u", "shell_mass_F", "ratio_u",
                        "ratio_F"}) {
    h.emplace_back(s);
  }
  return h;
}

std::string csv_row(const TimeSeriesRecord& r) {
  std::string line;
  char buf[32];
  auto add = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    if (!line.empty()) line += ',';
    line += buf;
  };
  add(r.time);
  add(r.l2_u_sq);
  add(r.l2_f_sq);
  for (double v : r.hm_sq) add(v);
  add(r.dissipation_u);
  add(r.damping_f);
  add(r.shell_mass_u);
  add(r.shell_mass_f);
  add(r.ratio_u);
  add(r.ratio_f);
  return line;
}

std::size_t CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  std::string available;
  for (const auto& c : columns) available += (available.empty() ? "" : ", ") + c;
  throw IoError("no column '" + name + "' (available: " + available + ")");
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const std::size_t i = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[i]);
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open CSV " + path);
  CsvTable t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  if (!std::getline(in, line)) throw IoError("CSV " + path + " is empty");
  t.columns = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.columns.size()) {
      throw IoError("CSV " + path + " line " + std::to_string(lineno) + " has " +
                    std::to_string(cells.size()) + " cells, header has " +
                    std::to_string(t.columns.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0) {
        throw IoError("CSV " + path + " line " + std::to_string(lineno) + ": bad number '" + c +
                      "'");
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace oldroyd
