// Copyright 2026 The NST Toolkit Authors.
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

#ifndef NST_ERRORS_H_
#define NST_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nst {

// Precondition violations throw std::invalid_argument. The classes below
// cover failures a caller may want to tell apart.

class UnknownTokenError : public std::runtime_error {
 public:
  explicit UnknownTokenError(const std::string& token)
      : std::runtime_error("unknown token: '" + token + "'"), token_(token) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class MissingFileError : public std::runtime_error {
 public:
  explicit MissingFileError(const std::string& path)
      : std::runtime_error("missing file: " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Raised by FitFilter when all token lengths are equal.
class DegenerateFitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Wraps a failure inside one pipeline stage.
class StageError : public std::runtime_error {
 public:
  StageError(int generation, const std::string& stage, const std::string& what)
      : std::runtime_error("generation " + std::to_string(generation) +
                           ", stage '" + stage + "': " + what),
        generation_(generation),
        stage_(stage) {}
  int generation() const { return generation_; }
  const std::string& stage() const { return stage_; }

 private:
  int generation_;
  std::string stage_;
};

}  // namespace nst

#endif  // NST_ERRORS_H_
