// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "genomagent/core/types.hpp"

namespace genomagent {

struct QaOutcome {
  Prediction prediction;
  Transcript transcript;
};

/// Common interface answered by both the multi-agent pipeline and the
/// single-agent baseline. Failures are encoded in the transcript outcome;
/// implementations never throw.
class QaEngine {
 public:
  virtual ~QaEngine() = default;
  virtual QaOutcome answer(const Question& question) = 0;
};

}  // namespace genomagent
