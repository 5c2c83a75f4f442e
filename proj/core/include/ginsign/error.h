// Copyright 2026 The ginsign Authors.
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

#ifndef GINSIGN_ERROR_H_
#define GINSIGN_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace ginsign {

enum class ErrorKind {
  kInvalidArgument,
  kIo,
  kSchema,
  kUnknownType,
  kDuplicateName,
  kInvalidIdentifier,
  kSizeLimit,
  kSyntax,
  kMixedAtomKinds,
  kMissingMapping,
  kEmptyCandidateList,
  kSlotOutOfRange,
  kScorerFailure,
  kTransport,
  kProtocolViolation,
  kTimeout,
  kBoundTooSmall,
  kAlphabetTooLarge,
  kUngroundedAtom,
  kAlignmentMismatch,
  kTypeError,
};

std::string_view ErrorKindName(ErrorKind kind);

// All library failures are reported through this exception. The kind is the
// stable machine-readable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const { return kind_; }
  // The message without the kind prefix.
  const std::string &detail() const { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace ginsign

#endif  // GINSIGN_ERROR_H_
