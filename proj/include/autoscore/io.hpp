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

#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "autoscore/json.hpp"

namespace autoscore::io {

/// Whole file as bytes. Throws kIo.
std::string ReadFile(const std::filesystem::path& path);

/// Writes via a temporary sibling and rename, so readers never see a
/// partially written file. Throws kIo.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view contents);

/// One JSON value per non-empty line. A torn final line (no trailing
/// newline, unparsable) is ignored; any other bad line throws kIo.
std::vector<Json> ReadJsonLines(const std::filesystem::path& path);

/// Append-only line writer; every line is flushed and fsync'd before
/// Append returns.
class LineAppender {
 public:
  explicit LineAppender(const std::filesystem::path& path);
  ~LineAppender();
  LineAppender(const LineAppender&) = delete;
  LineAppender& operator=(const LineAppender&) = delete;

  void Append(std::string_view line);

 private:
  std::FILE* file_ = nullptr;
  std::filesystem::path path_;
};

}  // namespace autoscore::io
