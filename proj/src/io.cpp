// Copyright 2026 The autoscore Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "autoscore/io.hpp"

#include <unistd.h>

#include <fstream>
#include <sstream>

#include "autoscore/error.hpp"

namespace autoscore::io {

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFileAtomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "rename to " + path.string() + ": " + ec.message());
}

std::vector<Json> ReadJsonLines(const std::filesystem::path& path) {
  std::string data = ReadFile(path);
  std::vector<Json> out;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < data.size()) {
    std::size_t end = data.find('\n', start);
    bool terminated = end != std::string::npos;
    if (!terminated) end = data.size();
    ++line_no;
    std::string_view line(data.data() + start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) {
      Json j = Json::parse(line, nullptr, /*allow_exceptions=*/false);
      if (j.is_discarded()) {
        if (!terminated) break;
        throw Error(ErrorCode::kIo,
                    path.string() + ":" + std::to_string(line_no) + ": invalid JSON line");
      }
      out.push_back(std::move(j));
    }
    start = end + 1;
  }
  return out;
}

LineAppender::LineAppender(const std::filesystem::path& path) : path_(path) {
  file_ = std::fopen(path.c_str(), "ab");
  if (file_ == nullptr) throw Error(ErrorCode::kIo, "cannot append to " + path.string());
}

LineAppender::~LineAppender() {
  if (file_ != nullptr) std::fclose(file_);
}

void LineAppender::Append(std::string_view line) {
  if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() ||
      std::fputc('\n', file_) == EOF || std::fflush(file_) != 0) {
    throw Error(ErrorCode::kIo, "write failed on " + path_.string());
  }
  ::fsync(::fileno(file_));
}

}  // namespace autoscore::io
