#include "cbo/harness/idx.hpp"

#include <fstream>
#include <iterator>
#include <string>

#include "cbo/errors.hpp"

namespace cbo::harness {

namespace {

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<std::uint8_t>& bytes, std::size_t offset,
                   const std::filesystem::path& path) {
  if (bytes.size() < offset + 4)
    throw LengthError(path.string() + ": truncated header (" + std::to_string(bytes.size()) +
                      " bytes)");
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void expect_magic(std::uint32_t got, std::uint32_t want, const std::filesystem::path& path) {
  if (got != want)
    throw FormatError(path.string() + ": magic number " + std::to_string(got) + ", expected " +
                      std::to_string(want));
}

void put_be32(std::ofstream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b, 4);
}

}  // namespace

IdxDataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                    std::size_t limit) {
  const auto img = slurp(images);
  expect_magic(be32(img, 0, images), kIdxImageMagic, images);
  const std::size_t count = be32(img, 4, images);
  const std::size_t rows = be32(img, 8, images);
  const std::size_t cols = be32(img, 12, images);
  const std::size_t pixels = rows * cols;
  if (img.size() < 16 + count * pixels)
    throw LengthError(images.string() + ": header promises " + std::to_string(count) +
                      " images of " + std::to_string(pixels) + " bytes but the file has " +
                      std::to_string(img.size()) + " bytes");

  const auto lab = slurp(labels);
  expect_magic(be32(lab, 0, labels), kIdxLabelMagic, labels);
  const std::size_t label_count = be32(lab, 4, labels);
  if (lab.size() < 8 + label_count)
    throw LengthError(labels.string() + ": header promises " + std::to_string(label_count) +
                      " labels but the file has " + std::to_string(lab.size()) + " bytes");
  if (label_count != count)
    throw ConsistencyError(images.string() + " has " + std::to_string(count) + " images but " +
                           labels.string() + " has " + std::to_string(label_count) + " labels");

  const std::size_t keep = limit == 0 ? count : std::min(limit, count);
  IdxDataset out;
  out.rows = rows;
  out.cols = cols;
  out.data.input_dim = pixels;
  out.data.n_classes = 10;
  out.data.inputs.resize(keep * pixels);
  for (std::size_t k = 0; k < keep * pixels; ++k)
    out.data.inputs[k] = static_cast<float>(img[16 + k]) / 255.0f;
  out.data.labels.assign(lab.begin() + 8, lab.begin() + 8 + static_cast<std::ptrdiff_t>(keep));
  for (auto l : out.data.labels)
    if (l >= 10)
      throw FormatError(labels.string() + ": label " + std::to_string(l) + " outside 0..9");
  return out;
}

void write_idx_images(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                      const std::vector<std::uint8_t>& pixels) {
  if (rows * cols == 0 || pixels.size() % (rows * cols) != 0)
    throw InputError("pixel buffer is not a whole number of images");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  put_be32(out, kIdxImageMagic);
  put_be32(out, static_cast<std::uint32_t>(pixels.size() / (rows * cols)));
  put_be32(out, static_cast<std::uint32_t>(rows));
  put_be32(out, static_cast<std::uint32_t>(cols));
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
}

void write_idx_labels(const std::filesystem::path& path, const std::vector<std::uint8_t>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  put_be32(out, kIdxLabelMagic);
  put_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
}

}  // namespace cbo::harness
