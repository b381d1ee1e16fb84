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

#include "scodec/error.h"

namespace scodec {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kModelMismatch: return "model-mismatch";
    case ErrorKind::kCorrupt: return "corrupt";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kSequencing: return "sequencing";
    case ErrorKind::kDecode: return "decode";
  }
  return "unknown";
}

void Fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(ErrorKindName(kind)) + " error: " + what);
}

}  // namespace scodec
