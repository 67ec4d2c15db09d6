#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "lamfam/errors.hpp"
#include "lamfam/quadfield.hpp"

namespace lamfam::io {

namespace fs = std::filesystem;

/// Whole file as text; a missing or unreadable file is a ParseError.
inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Write to a sibling temporary and rename over the target.
inline void atomic_write(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(tmp.string() + ": cannot open for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error(tmp.string() + ": write failed");
  }
  fs::rename(tmp, path);
}

/// 64-bit FNV-1a, used only to name cache entries.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
  return out;
}

// ---- ideal cache ----

/// CSV `norm,a,b,content`, one ideal per row, in the (norm, a, b) order of
/// IdealRep.
inline std::string ideals_to_csv(const std::vector<IdealRep>& ideals) {
  std::string out = "norm,a,b,content\n";
  for (const auto& I : ideals)
    out += std::to_string(I.norm()) + "," + std::to_string(I.a()) + "," + std::to_string(I.b()) + "," + std::to_string(I.content()) + "\n";
  return out;
}

inline std::vector<IdealRep> ideals_from_csv(const QuadField& K, const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "norm,a,b,content") throw ParseError(source + ":1: bad header");
  std::vector<IdealRep> out;
  for (int row = 2; std::getline(in, line); ++row) {
    std::int64_t v[4];
    std::istringstream ls(line);
    std::string cell;
    for (int c = 0; c < 4; ++c) {
      if (!std::getline(ls, cell, ',')) throw ParseError(source + ":" + std::to_string(row) + ": expected 4 fields");
      try {
        std::size_t used = 0;
        v[c] = std::stoll(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError(source + ":" + std::to_string(row) + ": bad integer '" + cell + "'");
      }
    }
    IdealRep I;
    try {
      I = K.from_abc(v[1], v[2], v[3]);
    } catch (const DomainError& e) {
      throw ParseError(source + ":" + std::to_string(row) + ": " + e.what());
    }
    if (I.norm() != v[0] || I.a() != v[1] || I.b() != v[2])
      throw ParseError(source + ":" + std::to_string(row) + ": row is not a reduced (norm, a, b, content) triple");
    out.push_back(I);
  }
  return out;
}

/// Ideals of norm <= nmax, read from `dir` when cached there and written
/// atomically otherwise. The entry name is a hash of (d_K, nmax).
inline std::vector<IdealRep> cached_ideals(const QuadField& K, std::int64_t nmax, const fs::path& dir) {
  const std::string key = "d_K=" + std::to_string(K.d()) + ";nmax=" + std::to_string(nmax);
  const fs::path path = dir / ("ideals-" + hex64(fnv1a(key)) + ".csv");
  if (fs::exists(path)) return ideals_from_csv(K, read_text(path), path.string());
  auto ideals = K.enumerate_ideals(nmax);
  atomic_write(path, ideals_to_csv(ideals));
  return ideals;
}

}  // namespace lamfam::io
