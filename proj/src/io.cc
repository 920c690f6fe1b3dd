// Copyright 2026 The Atlas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "atlas/io.h"

#include <fstream>
#include <sstream>

#include "atlas/common.h"

namespace atlas::io {

namespace fs = std::filesystem;

std::string read_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const fs::path &path, std::string_view data) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(std::hash<std::string>{}(path.string()) % 100000);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorCode::kIoError, "short write to " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = kDigits[h & 0xF];
  return out;
}

std::string file_hash(const fs::path &path) { return fnv1a_hex(read_file(path)); }

void for_each_jsonl(const fs::path &path,
                    const std::function<void(const json &, std::size_t)> &fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error &e) {
      throw Error(ErrorCode::kFormatError,
                  path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    try {
      fn(row, lineno);
    } catch (const json::exception &e) {
      throw Error(ErrorCode::kFormatError,
                  path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::string to_jsonl(const std::vector<json> &rows) {
  std::string out;
  for (const auto &row : rows) {
    out += row.dump(-1, ' ', false, json::error_handler_t::strict);
    out += '\n';
  }
  return out;
}

std::string get_string(const json &obj, std::string_view key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorCode::kFormatError, "missing string field '" + std::string(key) + "'");
  }
  return it->get<std::string>();
}

std::int64_t get_int(const json &obj, std::string_view key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer()) {
    throw Error(ErrorCode::kFormatError, "missing integer field '" + std::string(key) + "'");
  }
  return it->get<std::int64_t>();
}

}  // namespace atlas::io
