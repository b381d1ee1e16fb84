// Copyright (c) the scodec authors
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

#ifndef SCODEC_ERROR_H_
#define SCODEC_ERROR_H_

#include <stdexcept>
#include <string>

namespace scodec {

// Broad failure classes. The CLI maps these onto process exit codes.
enum class ErrorKind {
  kConfig,         // invalid shapes, sizes or options
  kIo,             // file could not be read or written
  kFormat,         // malformed container / weight file / image
  kModelMismatch,  // container model_id differs from loaded weights
  kCorrupt,        // digest or stream integrity failure
  kSchema,         // a network requested a parameter that is missing
  kSequencing,     // autoregressive steps called out of order
  kDecode,         // entropy decoding ran past the end of a stream
};

const char* ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void Fail(ErrorKind kind, const std::string& what);

}  // namespace scodec

#endif  // SCODEC_ERROR_H_
