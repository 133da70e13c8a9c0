#include "crinifer/io.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace crinifer {

using nlohmann::json;

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw IoError("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& p, std::string_view data) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

std::string ray_tail_to_json(const RayTail& r) {
  json j;
  j["address"] = r.address.str();
  j["depth"] = r.depth;
  json pts = json::array(), pb = json::array();
  for (const auto& p : r.points) {
    pts.push_back({p.t, p.z.real(), p.z.imag()});
    pb.push_back(p.pullbacks);
  }
  j["points"] = std::move(pts);
  j["pullbacks"] = std::move(pb);
  return j.dump(1) + "\n";
}

RayTail ray_tail_from_json(const std::string& text) {
  RayTail r;
  try {
    json j = json::parse(text);
    r.address = ExternalAddress::parse(j.at("address").get<std::string>());
    r.depth = j.at("depth").get<int>();
    const auto& pts = j.at("points");
    const json pb = j.value("pullbacks", json::array());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& p = pts[i];
      r.points.push_back({p.at(0).get<double>(), {p.at(1).get<double>(), p.at(2).get<double>()},
                          i < pb.size() ? pb[i].get<int>() : 0});
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed ray JSON: ") + e.what());
  }
  for (std::size_t i = 1; i < r.points.size(); ++i)
    if (!(r.points[i].t < r.points[i - 1].t)) throw IoError("ray labels not strictly decreasing");
  return r;
}

}  // namespace crinifer
