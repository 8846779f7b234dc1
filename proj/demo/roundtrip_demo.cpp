// Compress, scramble and seal a 256x256 image, then recover it.

#include <cstdio>

#include "latentseal/latentseal.hpp"

int main() {
  using namespace latentseal;

  const GrayImage image = smooth_gradient(256);
  const CodecModel codec{DctCodec{256, 256, kDefaultLatentSize}};
  const KeySet keys = generate_keys();

  const auto sealed = compress_encrypt(image, codec, keys.sym, keys.ecies.pub);
  const Bytes wire = serialize(sealed.payload);
  const auto opened = decrypt_reconstruct(parse_payload(wire), codec, keys.sym, keys.ecies.priv);

  std::printf("pixels in: %zu, payload bytes: %zu\n", image.size(), wire.size());
  std::printf("%s\n", kQualityCsvHeader);
  QualityReport row;
  row.ssim = ssim(image, opened.image);
  row.mse = mse(image, opened.image);
  row.psnr = psnr_from_mse(row.mse);
  row.encrypt_seconds = sealed.seconds;
  row.decrypt_seconds = opened.seconds;
  std::printf("%s\n", to_csv_row(row).c_str());
  return 0;
}
