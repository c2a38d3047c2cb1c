// The malformed-input corpus: 20 schema violations, each attributable to
// a specific frame, written as real files next to a valid counterpart.
#pragma once

#include <string>
#include <vector>

#include "raileval/dataset_io.hpp"

namespace synth {

struct MalformedCase {
  std::string name;
  raileval::io::Challenge challenge;
  bool bad_predictions = false; // violation sits in the prediction file
  std::string gt_path;
  std::string pred_path;
  std::string expect_frame_id; // must appear in the diagnostic
};

/// Writes the corpus (plus the valid companion documents and mask PNGs it
/// needs) into `dir` and returns one entry per case.
std::vector<MalformedCase> write_malformed_corpus(const std::string& dir);

} // namespace synth
