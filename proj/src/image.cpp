#include "sixd/image.hpp"

#include <zlib.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sixd {

namespace {

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

struct PnmHeader {
  std::string magic;
  int width = 0, height = 0, maxval = 0;
  size_t payload_offset = 0;
};

// Minimal parser: token whitespace separation, '#' comments.
PnmHeader parse_pnm_header(const std::string& bytes, const std::string& path) {
  PnmHeader h;
  size_t pos = 0;
  auto next_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (start == pos) throw std::runtime_error("truncated PNM header: " + path);
    return bytes.substr(start, pos - start);
  };
  h.magic = next_token();
  h.width = std::stoi(next_token());
  h.height = std::stoi(next_token());
  h.maxval = std::stoi(next_token());
  if (pos >= bytes.size()) throw std::runtime_error("truncated PNM header: " + path);
  h.payload_offset = pos + 1;  // single whitespace after maxval
  if (h.width <= 0 || h.height <= 0)
    throw std::runtime_error("bad PNM dimensions: " + path);
  return h;
}

std::string pnm_header(const char* magic, int w, int h, int maxval) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s\n%d %d\n%d\n", magic, w, h, maxval);
  return buf;
}

}  // namespace

void write_ppm(const std::string& path, const ColorImage& img) {
  std::string bytes = pnm_header("P6", img.width, img.height, 255);
  bytes.reserve(bytes.size() + img.data.size() * 3);
  for (const Rgb8& px : img.data) {
    bytes.push_back(static_cast<char>(px.r));
    bytes.push_back(static_cast<char>(px.g));
    bytes.push_back(static_cast<char>(px.b));
  }
  write_file(path, bytes);
}

ColorImage read_ppm(const std::string& path) {
  const std::string bytes = read_file(path);
  const PnmHeader h = parse_pnm_header(bytes, path);
  if (h.magic != "P6" || h.maxval != 255)
    throw std::runtime_error("expected 8-bit P6 PPM: " + path);
  const size_t need = static_cast<size_t>(h.width) * h.height * 3;
  if (bytes.size() < h.payload_offset + need)
    throw std::runtime_error("truncated PPM payload: " + path);
  ColorImage img(h.width, h.height);
  const char* p = bytes.data() + h.payload_offset;
  for (Rgb8& px : img.data) {
    px.r = static_cast<std::uint8_t>(*p++);
    px.g = static_cast<std::uint8_t>(*p++);
    px.b = static_cast<std::uint8_t>(*p++);
  }
  return img;
}

void write_pgm8(const std::string& path, const MaskImage& img) {
  std::string bytes = pnm_header("P5", img.width, img.height, 255);
  bytes.append(reinterpret_cast<const char*>(img.data.data()), img.data.size());
  write_file(path, bytes);
}

MaskImage read_pgm8(const std::string& path) {
  const std::string bytes = read_file(path);
  const PnmHeader h = parse_pnm_header(bytes, path);
  if (h.magic != "P5" || h.maxval != 255)
    throw std::runtime_error("expected 8-bit P5 PGM: " + path);
  const size_t need = static_cast<size_t>(h.width) * h.height;
  if (bytes.size() < h.payload_offset + need)
    throw std::runtime_error("truncated PGM payload: " + path);
  MaskImage img(h.width, h.height);
  std::memcpy(img.data.data(), bytes.data() + h.payload_offset, need);
  return img;
}

void write_pgm16(const std::string& path, const DepthImage16& img) {
  std::string bytes = pnm_header("P5", img.width, img.height, 65535);
  bytes.reserve(bytes.size() + img.data.size() * 2);
  for (std::uint16_t v : img.data) {
    bytes.push_back(static_cast<char>(v >> 8));  // big-endian per NetPBM
    bytes.push_back(static_cast<char>(v & 0xff));
  }
  write_file(path, bytes);
}

DepthImage16 read_pgm16(const std::string& path) {
  const std::string bytes = read_file(path);
  const PnmHeader h = parse_pnm_header(bytes, path);
  if (h.magic != "P5" || h.maxval != 65535)
    throw std::runtime_error("expected 16-bit P5 PGM: " + path);
  const size_t need = static_cast<size_t>(h.width) * h.height * 2;
  if (bytes.size() < h.payload_offset + need)
    throw std::runtime_error("truncated PGM payload: " + path);
  DepthImage16 img(h.width, h.height);
  const unsigned char* p =
      reinterpret_cast<const unsigned char*>(bytes.data()) + h.payload_offset;
  for (std::uint16_t& v : img.data) {
    v = static_cast<std::uint16_t>((p[0] << 8) | p[1]);
    p += 2;
  }
  return img;
}

namespace {

void put_u32be(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v >> 24));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>(v & 0xff));
}

void put_chunk(std::string& out, const char type[4], const std::string& payload) {
  put_u32be(out, static_cast<std::uint32_t>(payload.size()));
  std::string body(type, 4);
  body += payload;
  out += body;
  const auto crc = crc32(0, reinterpret_cast<const Bytef*>(body.data()),
                         static_cast<uInt>(body.size()));
  put_u32be(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

void write_png(const std::string& path, const ColorImage& img) {
  std::string raw;  // filter byte 0 + RGB per row
  raw.reserve(static_cast<size_t>(img.height) * (1 + 3 * img.width));
  for (int v = 0; v < img.height; ++v) {
    raw.push_back('\0');
    for (int u = 0; u < img.width; ++u) {
      const Rgb8& px = img.at(u, v);
      raw.push_back(static_cast<char>(px.r));
      raw.push_back(static_cast<char>(px.g));
      raw.push_back(static_cast<char>(px.b));
    }
  }
  uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
  std::string compressed(comp_len, '\0');
  if (compress(reinterpret_cast<Bytef*>(compressed.data()), &comp_len,
               reinterpret_cast<const Bytef*>(raw.data()),
               static_cast<uLong>(raw.size())) != Z_OK)
    throw std::runtime_error("PNG deflate failed: " + path);
  compressed.resize(comp_len);

  std::string out("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  put_u32be(ihdr, static_cast<std::uint32_t>(img.width));
  put_u32be(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr += '\x08';  // bit depth
  ihdr += '\x02';  // color type: truecolor
  ihdr += std::string(3, '\0');  // compression, filter, interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", compressed);
  put_chunk(out, "IEND", "");
  write_file(path, out);
}

}  // namespace sixd
