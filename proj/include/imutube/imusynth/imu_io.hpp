#pragma once

#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "imutube/core/io.hpp"
#include "imutube/imusynth/signals.hpp"

namespace imutube::imusynth {

inline constexpr std::string_view kImuCsvHeader = "t,ax,ay,az,gx,gy,gz,mx,my,mz";

inline std::string imu_csv(const IMUStream& s) {
  s.validate();
  std::string out(kImuCsvHeader);
  out += '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += format_number(static_cast<double>(i) / s.rate);
    for (const Vec3* v : {&s.accel[i], &s.gyro[i], &s.mag[i]})
      for (int c = 0; c < 3; ++c) {
        out += ',';
        out += format_number((*v)[c]);
      }
    out += '\n';
  }
  return out;
}

inline nlohmann::ordered_json imu_sidecar(const IMUStream& s) {
  return {{"subject", s.subject}, {"label", s.label},   {"placement", s.placement}, {"rate", s.rate},
          {"origin", s.origin},   {"clip", s.clip},     {"track", s.track},         {"samples", s.size()}};
}

/// Sidecar path: the CSV path with its extension replaced by ".json".
inline fs::path sidecar_path(fs::path csv) { return csv.replace_extension(".json"); }

inline void write_imu(const fs::path& csv_path, const IMUStream& s) {
  write_file_atomic(csv_path, imu_csv(s));
  write_file_atomic(sidecar_path(csv_path), imu_sidecar(s).dump(2) + "\n");
}

inline IMUStream read_imu(const fs::path& csv_path) {
  const std::string src = csv_path.string();
  IMUStream s;
  const fs::path meta_path = sidecar_path(csv_path);
  try {
    const auto meta = nlohmann::json::parse(read_file(meta_path));
    s.subject = meta.at("subject").get<std::string>();
    s.label = meta.at("label").get<std::string>();
    s.placement = meta.at("placement").get<std::string>();
    s.rate = meta.at("rate").get<double>();
    s.origin = meta.at("origin").get<std::string>();
    s.clip = meta.value("clip", std::string());
    s.track = meta.value("track", 0);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(meta_path.string(), 0, e.what());
  }
  std::istringstream in(read_file(csv_path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != kImuCsvHeader) throw ParseError(src, 1, "unexpected header '" + line + "'");
      continue;
    }
    if (line.empty()) continue;
    double v[10];
    std::istringstream row(line);
    std::string cell;
    int c = 0;
    while (std::getline(row, cell, ',')) {
      if (c >= 10) throw ParseError(src, lineno, "too many columns");
      try {
        std::size_t used = 0;
        v[c] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError(src, lineno, "bad number '" + cell + "'");
      }
      if (!std::isfinite(v[c])) throw ParseError(src, lineno, "non-finite value");
      ++c;
    }
    if (c != 10) throw ParseError(src, lineno, "expected 10 columns, got " + std::to_string(c));
    s.accel.emplace_back(v[1], v[2], v[3]);
    s.gyro.emplace_back(v[4], v[5], v[6]);
    s.mag.emplace_back(v[7], v[8], v[9]);
  }
  if (lineno == 0) throw ParseError(src, 0, "empty file");
  return s;
}

}  // namespace imutube::imusynth
