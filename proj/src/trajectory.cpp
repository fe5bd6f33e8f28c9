#include "visconv/trajectory.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "visconv/errors.hpp"
#include "visconv/spectral_ops.hpp"

namespace visconv {

namespace {

constexpr const char* kMagic = "VSCT1";
constexpr int kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

void put_double(std::string& buf, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char raw[8];
  std::memcpy(raw, &bits, 8);
  buf.append(raw, 8);
}

double get_double(const char* p) {
  std::uint64_t bits;
  std::memcpy(&bits, p, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  return std::bit_cast<double>(bits);
}

template <class T>
T require(const nlohmann::json& h, const char* key) {
  if (!h.contains(key)) throw FormatError(std::string("VSCT1 header lacks '") + key + "'");
  try {
    return h.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string("VSCT1 header field '") + key + "' has the wrong type");
  }
}

}  // namespace

std::size_t Trajectory::index_of(double t) const {
  if (states.empty()) throw DataRangeError("trajectory is empty");
  const double pos = (t - t0) / dt_record;
  const double idx = std::round(pos);
  if (std::abs(pos - idx) > 1e-9 || idx < 0 || idx > static_cast<double>(states.size() - 1)) {
    throw DataRangeError("time " + std::to_string(t) + " is not a sample time of the record [" +
                         std::to_string(t0) + ", " + std::to_string(end_time()) + "]");
  }
  return static_cast<std::size_t>(idx);
}

int stored_half_width(const Trajectory& traj) {
  const int K = traj.grid.cutoff();
  if (!traj.cutoff) return K;
  const int inside = static_cast<int>(std::ceil(*traj.cutoff)) - 1;
  return std::max(0, std::min(K, inside));
}

Trajectory observe(const Trajectory& truth, double n) {
  Trajectory obs = truth;
  obs.cutoff = n;
  for (auto& s : obs.states) s = modal_project(s, n);
  return obs;
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  const int ks = stored_half_width(traj);
  nlohmann::json header = {
      {"format", kMagic},
      {"version", kFormatVersion},
      {"L", traj.grid.length()},
      {"M", traj.grid.resolution()},
      {"kappa0", traj.grid.kappa0()},
      {"cutoff", traj.cutoff ? nlohmann::json(*traj.cutoff) : nlohmann::json("full")},
      {"stored_half_width", ks},
      {"dt_record", traj.dt_record},
      {"t0", traj.t0},
      {"count", traj.size()},
      {"nu", traj.nu ? nlohmann::json(*traj.nu) : nlohmann::json(nullptr)},
      {"transient_count", traj.transient_count},
      {"provenance", traj.provenance},
  };

  std::string payload;
  const std::size_t width = 2 * static_cast<std::size_t>(ks) + 1;
  payload.reserve(traj.size() * width * width * 32);
  for (const auto& s : traj.states) {
    for (int k1 = -ks; k1 <= ks; ++k1) {
      for (int k2 = -ks; k2 <= ks; ++k2) {
        const auto& c = s.at(k1, k2);
        put_double(payload, c.x.real());
        put_double(payload, c.x.imag());
        put_double(payload, c.y.real());
        put_double(payload, c.y.imag());
      }
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << kMagic << '\n' << header.dump() << '\n';
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw FormatError("write failed: " + path.string());
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string magic;
  std::getline(in, magic);
  if (magic != kMagic) throw FormatError(path.string() + " is not a VSCT1 file");
  std::string line;
  if (!std::getline(in, line)) throw FormatError("VSCT1 header missing in " + path.string());
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("VSCT1 header is not valid JSON: " + std::string(e.what()));
  }
  if (require<int>(h, "version") != kFormatVersion) throw FormatError("unsupported VSCT1 version");

  const TorusGrid grid(require<double>(h, "L"), require<int>(h, "M"));
  if (std::abs(require<double>(h, "kappa0") - grid.kappa0()) > 1e-12 * grid.kappa0()) {
    throw FormatError("VSCT1 header kappa0 disagrees with L");
  }
  Trajectory traj(grid);
  const auto& cut = h.at("cutoff");
  if (cut.is_number()) {
    traj.cutoff = cut.get<double>();
  } else if (!(cut.is_string() && cut.get<std::string>() == "full")) {
    throw FormatError("VSCT1 cutoff must be a number or \"full\"");
  }
  traj.dt_record = require<double>(h, "dt_record");
  traj.t0 = require<double>(h, "t0");
  if (h.contains("nu") && !h.at("nu").is_null()) traj.nu = h.at("nu").get<double>();
  traj.transient_count = require<std::size_t>(h, "transient_count");
  if (h.contains("provenance")) traj.provenance = h.at("provenance");
  const auto count = require<std::size_t>(h, "count");
  const int ks = require<int>(h, "stored_half_width");
  if (ks < 0 || ks > grid.cutoff()) throw FormatError("VSCT1 stored rectangle exceeds the grid band");
  if (ks != stored_half_width(traj)) throw FormatError("VSCT1 stored rectangle disagrees with cutoff");
  if (traj.transient_count > count) throw FormatError("VSCT1 transient_count exceeds count");

  const std::size_t width = 2 * static_cast<std::size_t>(ks) + 1;
  const std::size_t expected = count * width * width * 32;
  const auto start = in.tellg();
  in.seekg(0, std::ios::end);
  const auto available = static_cast<std::size_t>(in.tellg() - start);
  if (available != expected) {
    throw FormatError("VSCT1 payload has " + std::to_string(available) + " bytes, header implies " +
                      std::to_string(expected));
  }
  in.seekg(start);
  std::string payload(expected, '\0');
  in.read(payload.data(), static_cast<std::streamsize>(expected));
  if (!in) throw FormatError("short read in " + path.string());

  const char* p = payload.data();
  traj.states.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    SpectralField f(grid);
    for (int k1 = -ks; k1 <= ks; ++k1) {
      for (int k2 = -ks; k2 <= ks; ++k2) {
        auto& c = f.at(k1, k2);
        c.x = {get_double(p), get_double(p + 8)};
        c.y = {get_double(p + 16), get_double(p + 24)};
        p += 32;
      }
    }
    traj.states.push_back(std::move(f));
  }
  return traj;
}

}  // namespace visconv
