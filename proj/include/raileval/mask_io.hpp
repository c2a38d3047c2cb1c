#pragma once

#include <string>

#include "raileval/segmentation_metrics.hpp"

namespace raileval::seg {

/// Reads an 8-bit single-channel (grayscale) PNG into a LabelMask.
/// Throws std::runtime_error on I/O errors or unsupported formats.
LabelMask load_mask_png(const std::string& path);

void save_mask_png(const LabelMask& mask, const std::string& path);

} // namespace raileval::seg
