#include <fstream>

#include "doctest.h"
#include "dentsynth/rng.hpp"
#include "dentsynth/error.hpp"
#include "dentsynth/image.hpp"
#include "support.hpp"

using namespace dentsynth;

TEST_CASE("image: PNG round trip for RGB and masks") {
  testsupport::TempDir dir("png");
  Rng rng(1);
  RgbImage img(37, 23);
  for (auto& b : img.data) b = static_cast<std::uint8_t>(rng.below(256));
  write_png(img, dir / "a.png");
  const RgbImage back = read_image(dir / "a.png");
  CHECK(back.width == 37);
  CHECK(back.height == 23);
  CHECK(back.data == img.data);

  BinaryMask m(19, 11);
  for (auto& b : m.bits) b = static_cast<std::uint8_t>(rng.below(2));
  write_png(m, dir / "m.png");
  CHECK(read_mask_png(dir / "m.png") == m);
}

TEST_CASE("image: PNG encoding is deterministic") {
  RgbImage img(16, 16, Rgb{1, 2, 3});
  img.set(3, 4, {200, 100, 0});
  CHECK(encode_png(img) == encode_png(img));
  CHECK(sha256_hex(encode_png(img)) == sha256_hex(encode_png(img)));
}

TEST_CASE("image: JPEG decoding") {
  testsupport::TempDir dir("jpg");
  RgbImage img(40, 30, Rgb{120, 60, 200});
  testsupport::write_jpeg(img, dir / "a.jpg");
  const RgbImage back = read_image(dir / "a.jpg");
  CHECK(back.width == 40);
  CHECK(back.height == 30);
  const Rgb c = back.at(20, 15);
  CHECK(std::abs(c[0] - 120) <= 4);
  CHECK(std::abs(c[1] - 60) <= 4);
  CHECK(std::abs(c[2] - 200) <= 4);
}

TEST_CASE("image: undecodable bytes are an image error naming the source") {
  testsupport::TempDir dir("bad");
  std::ofstream(dir / "x.png") << "definitely not an image";
  try {
    read_image(dir / "x.png");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::image);
    CHECK(std::string(e.what()).find("x.png") != std::string::npos);
  }
  // truncated PNG
  RgbImage img(8, 8, Rgb{9, 9, 9});
  auto bytes = encode_png(img);
  bytes.resize(bytes.size() / 2);
  CHECK_THROWS_AS(decode_image(bytes, "half.png"), Error);
}

TEST_CASE("image: centre crop of a 4:3 frame") {
  RgbImage img(8, 6);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 8; ++x) img.set(x, y, {static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y), 0});
  const RgbImage sq = center_crop_square(img);
  CHECK(sq.width == 6);
  CHECK(sq.height == 6);
  CHECK(sq.at(0, 0) == Rgb{1, 0, 0});
  CHECK(sq.at(5, 5) == Rgb{6, 5, 0});
  RgbImage tall(3, 7);
  CHECK(center_crop_square(tall).height == 3);
}

TEST_CASE("image: bilinear resize keeps constants and interpolates ramps") {
  const RgbImage flat(10, 10, Rgb{77, 88, 99});
  const RgbImage up = resize_bilinear(flat, 33, 17);
  for (int y = 0; y < 17; ++y)
    for (int x = 0; x < 33; ++x) REQUIRE(up.at(x, y) == Rgb{77, 88, 99});
  RgbImage ramp(2, 1);
  ramp.set(0, 0, {0, 0, 0});
  ramp.set(1, 0, {200, 200, 200});
  const RgbImage wide = resize_bilinear(ramp, 4, 1);
  // pixel centres at 0.25, 0.75, 1.25, 1.75 in source -> clamp, 0.25, 0.75, clamp
  CHECK(wide.at(0, 0)[0] == 0);
  CHECK(wide.at(1, 0)[0] == 50);
  CHECK(wide.at(2, 0)[0] == 150);
  CHECK(wide.at(3, 0)[0] == 200);
}

TEST_CASE("image: sha256 of known vectors") {
  CHECK(sha256_hex(std::string("")) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex(std::string("abc")) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("image: is_image_file by extension") {
  CHECK(is_image_file("a/b.PNG"));
  CHECK(is_image_file("x.jpeg"));
  CHECK(is_image_file("x.jpg"));
  CHECK_FALSE(is_image_file("x.txt"));
}
