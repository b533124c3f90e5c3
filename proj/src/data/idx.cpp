#include "alexbench/data/idx.hpp"

#include <zlib.h>

#include <fstream>
#include <iterator>

#include "alexbench/error.hpp"

namespace alexbench::data {
namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void append_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void check_magic(std::span<const std::uint8_t> bytes, std::uint32_t expected) {
  if (bytes.size() < 4) {
    throw Error(ErrorCode::Truncated, "file shorter than the magic word");
  }
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != expected) {
    throw Error(ErrorCode::BadMagic, "unexpected magic word " + std::to_string(magic));
  }
}

}  // namespace

ImageTensor parse_idx_images(std::span<const std::uint8_t> bytes) {
  check_magic(bytes, kImageMagic);
  if (bytes.size() < 16) {
    throw Error(ErrorCode::Truncated, "image header needs 16 bytes");
  }
  ImageTensor t;
  t.count = read_be32(bytes, 4);
  t.rows = read_be32(bytes, 8);
  t.cols = read_be32(bytes, 12);
  for (std::uint32_t dim : {t.count, t.rows, t.cols}) {
    if (dim > kMaxDimension) {
      throw Error(ErrorCode::DimensionOverflow, "dimension " + std::to_string(dim));
    }
  }
  // Each factor is <= 1e8, so the product fits in 128 bits.
  const unsigned __int128 payload =
      static_cast<unsigned __int128>(t.count) * t.rows * t.cols;
  if (payload != bytes.size() - 16) {
    throw Error(ErrorCode::Truncated, "payload length does not match header");
  }
  t.pixels.assign(bytes.begin() + 16, bytes.end());
  return t;
}

std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes,
                                           std::uint8_t num_classes) {
  check_magic(bytes, kLabelMagic);
  if (bytes.size() < 8) {
    throw Error(ErrorCode::Truncated, "label header needs 8 bytes");
  }
  const std::uint32_t count = read_be32(bytes, 4);
  if (count > kMaxDimension) {
    throw Error(ErrorCode::DimensionOverflow, "label count " + std::to_string(count));
  }
  if (bytes.size() - 8 != count) {
    throw Error(ErrorCode::Truncated, "label payload length does not match header");
  }
  std::vector<std::uint8_t> labels(bytes.begin() + 8, bytes.end());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= num_classes) {
      throw Error(ErrorCode::LabelOutOfRange,
                  "label " + std::to_string(labels[i]) + " at position " + std::to_string(i));
    }
  }
  return labels;
}

std::vector<std::uint8_t> write_idx_images(const ImageTensor& images) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + images.pixels.size());
  append_be32(out, kImageMagic);
  append_be32(out, images.count);
  append_be32(out, images.rows);
  append_be32(out, images.cols);
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

std::vector<std::uint8_t> write_idx_labels(std::span<const std::uint8_t> labels) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + labels.size());
  append_be32(out, kLabelMagic);
  append_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

std::vector<std::uint8_t> maybe_gunzip(std::vector<std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 0x1F || bytes[1] != 0x8B) {
    return bytes;
  }
  z_stream zs{};
  // 16 + MAX_WBITS selects the gzip wrapper.
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) {
    throw Error(ErrorCode::IoError, "zlib initialisation failed");
  }
  std::vector<std::uint8_t> out;
  std::uint8_t chunk[1 << 16];
  zs.next_in = bytes.data();
  zs.avail_in = static_cast<uInt>(bytes.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = chunk;
    zs.avail_out = sizeof(chunk);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw Error(ErrorCode::Truncated, "corrupt or truncated gzip stream");
    }
    out.insert(out.end(), chunk, chunk + (sizeof(chunk) - zs.avail_out));
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw Error(ErrorCode::Truncated, "gzip stream ended early");
    }
  }
  inflateEnd(&zs);
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace alexbench::data
