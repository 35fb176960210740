#include "sixd/segmentation.hpp"

#include <algorithm>
#include <stdexcept>

namespace sixd {

int SegmentationMap::channel_of(int object_id) const {
  for (size_t i = 0; i < channel_ids.size(); ++i)
    if (channel_ids[i] == object_id) return static_cast<int>(i);
  return -1;
}

void SegmentationMap::validate() const {
  if (channels.size() != channel_ids.size() || channels.empty() || channel_ids[0] != 0)
    throw std::runtime_error("SegmentationMap: malformed channel list");
  for (size_t i = 0; i < static_cast<size_t>(width) * height; ++i) {
    int covered = 0;
    for (const MaskImage& ch : channels) covered += ch.data[i] ? 1 : 0;
    if (covered != 1)
      throw std::runtime_error("SegmentationMap: channels must partition the frame");
  }
}

SegmentationMap gt_segment(const Frame& frame, const std::vector<int>& registry_ids) {
  SegmentationMap seg;
  seg.width = frame.mask.width;
  seg.height = frame.mask.height;
  seg.channel_ids.push_back(0);
  for (int id : registry_ids) seg.channel_ids.push_back(id);
  seg.channels.assign(seg.channel_ids.size(), MaskImage(seg.width, seg.height));
  for (int v = 0; v < seg.height; ++v) {
    for (int u = 0; u < seg.width; ++u) {
      const int id = frame.mask.at(u, v);
      int ch = id == 0 ? 0 : seg.channel_of(id);
      if (ch < 0) ch = 0;  // unregistered ids fold into background
      seg.channels[ch].at(u, v) = 1;
    }
  }
  return seg;
}

CropResult crop_and_mask(const SegmentationMap& seg, int object_id, const Frame& frame,
                         int pad) {
  const int ch = seg.channel_of(object_id);
  if (ch <= 0)
    throw std::invalid_argument("crop_and_mask: object " + std::to_string(object_id) +
                                " not in segmentation map");
  const MaskImage& mask = seg.channels[ch];
  int u0 = seg.width, v0 = seg.height, u1 = -1, v1 = -1;
  CropResult out;
  for (int v = 0; v < seg.height; ++v) {
    for (int u = 0; u < seg.width; ++u) {
      if (!mask.at(u, v)) continue;
      u0 = std::min(u0, u);
      v0 = std::min(v0, v);
      u1 = std::max(u1, u);
      v1 = std::max(v1, v);
      out.pixels.push_back({u, v});
      out.depths.push_back(frame.depth.at(u, v));
    }
  }
  if (u1 < 0)
    throw std::invalid_argument("crop_and_mask: object " + std::to_string(object_id) +
                                " not in frame");
  u0 = std::max(0, u0 - pad);
  v0 = std::max(0, v0 - pad);
  u1 = std::min(seg.width - 1, u1 + pad);
  v1 = std::min(seg.height - 1, v1 + pad);
  out.x0 = u0;
  out.y0 = v0;
  out.crop = ColorImage(u1 - u0 + 1, v1 - v0 + 1);
  for (int v = v0; v <= v1; ++v)
    for (int u = u0; u <= u1; ++u) out.crop.at(u - u0, v - v0) = frame.color.at(u, v);
  return out;
}

}  // namespace sixd
