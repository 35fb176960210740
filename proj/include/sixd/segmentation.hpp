#pragma once

#include <vector>

#include "sixd/scenegen.hpp"

namespace sixd {

/// N+1 binary channels; channel 0 is background. Channels are mutually
/// exclusive and cover the frame.
struct SegmentationMap {
  int width = 0, height = 0;
  std::vector<int> channel_ids;     // [0] = 0 (background)
  std::vector<MaskImage> channels;  // 0/1 per pixel

  int channel_of(int object_id) const;
  void validate() const;
};

/// Ground-truth mask oracle: channel for object k is true exactly where the
/// frame mask equals k. registry_ids lists every object in the dataset.
SegmentationMap gt_segment(const Frame& frame, const std::vector<int>& registry_ids);

struct CropResult {
  ColorImage crop;
  int x0 = 0, y0 = 0;              // crop origin in frame coordinates
  std::vector<PixelCoord> pixels;  // object pixels, frame coordinates
  std::vector<double> depths;      // meters, aligned with pixels
};

constexpr int kCropPadding = 5;

/// Tight bounding box around the object channel, padded and clamped.
/// Throws if the object has no pixels in the frame.
CropResult crop_and_mask(const SegmentationMap& seg, int object_id, const Frame& frame,
                         int pad = kCropPadding);

}  // namespace sixd
