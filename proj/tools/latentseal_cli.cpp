// latentseal: command-line front end for key generation, sealing, evaluation
// and framed transfer of compressed latent payloads.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "latentseal/latentseal.hpp"

namespace fs = std::filesystem;
using namespace latentseal;

namespace {

enum Exit : int {
  kOk = 0,
  kUsage = 2,
  kIo = 3,
  kCryptoAuth = 4,
  kFormat = 5,
  kDivergence = 6,
  kShape = 7,
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IoError:
    case ErrorKind::ConnectionError:
      return kIo;
    case ErrorKind::AuthFailure:
    case ErrorKind::InvalidPoint:
      return kCryptoAuth;
    case ErrorKind::BadHeader:
    case ErrorKind::Format:
    case ErrorKind::FrameTooLarge:
    case ErrorKind::InvalidKey:
    case ErrorKind::InvalidPublicKey:
      return kFormat;
    case ErrorKind::Divergence:
      return kDivergence;
    case ErrorKind::ShapeMismatch:
    case ErrorKind::MTooLarge:
    case ErrorKind::DimMismatch:
    case ErrorKind::WindowTooLarge:
      return kShape;
    default:
      return kUsage;
  }
}

// Output files go through rename, so the target directory must already exist.
void require_writable_parent(const fs::path& out) {
  const fs::path parent = out.has_parent_path() ? out.parent_path() : fs::path(".");
  if (!fs::is_directory(parent)) fail(ErrorKind::IoError, "output directory '" + parent.string() + "' does not exist");
}

std::pair<std::string, std::uint16_t> split_host_port(const std::string& target) {
  const auto colon = target.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == target.size()) {
    fail(ErrorKind::InvalidArgument, "expected host:port, got '" + target + "'");
  }
  std::string host = target.substr(0, colon);
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  unsigned long port = 0;
  try {
    std::size_t used = 0;
    port = std::stoul(target.substr(colon + 1), &used);
    if (used != target.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidArgument, "bad port in '" + target + "'");
  }
  if (port == 0 || port > 65535) fail(ErrorKind::InvalidArgument, "port out of range in '" + target + "'");
  return {host, static_cast<std::uint16_t>(port)};
}

std::string seconds_text(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", s);
  return buf;
}

struct KeygenArgs {
  std::string out;
  std::optional<std::uint64_t> seed;
};

int cmd_keygen(const KeygenArgs& a) {
  require_writable_parent(a.out + ".priv");
  write_keys(a.out, generate_keys(a.seed));
  return kOk;
}

struct EncryptArgs {
  std::string image, model, sym, pub, out;
};

int cmd_encrypt(const EncryptArgs& a) {
  require_writable_parent(a.out);
  const GrayImage img = read_image(a.image);
  const CodecModel codec = load_model(a.model);
  const SymKey sym = load_sym_key(a.sym);
  const PublicKey pub = load_public_key(a.pub);
  const auto enc = compress_encrypt(img, codec, sym, pub);
  const Bytes wire = serialize(enc.payload);
  write_file_atomic(a.out, wire);
  std::cout << "encrypt_s=" << seconds_text(enc.seconds) << " bytes=" << wire.size() << "\n";
  return kOk;
}

struct DecryptArgs {
  std::string payload, model, sym, priv, out;
};

int cmd_decrypt(const DecryptArgs& a) {
  require_writable_parent(a.out);
  const Bytes wire = read_file(a.payload);
  const CodecModel codec = load_model(a.model);
  const SymKey sym = load_sym_key(a.sym);
  const PrivateKey priv = load_private_key(a.priv);
  const auto dec = decrypt_reconstruct(parse_payload(wire), codec, sym, priv);
  write_pgm(a.out, dec.image);
  std::cout << "decrypt_s=" << seconds_text(dec.seconds) << "\n";
  return kOk;
}

struct EvaluateArgs {
  std::string dir, model, sym, pub, priv, out;
  std::size_t window = 0;
};

int cmd_evaluate(const EvaluateArgs& a) {
  if (!a.out.empty()) require_writable_parent(a.out);
  const CodecModel codec = load_model(a.model);
  const SymKey sym = load_sym_key(a.sym);
  const PublicKey pub = load_public_key(a.pub);
  const PrivateKey priv = load_private_key(a.priv);
  const SsimParams params = a.window > 0 ? SsimParams::windowed(a.window) : SsimParams{};

  std::string csv = std::string(kQualityCsvHeader) + "\n";
  int status = kOk;
  for (const auto& path : list_images(a.dir)) {
    try {
      csv += to_csv_row(evaluate(read_image(path), codec, sym, pub, priv, params)) + "\n";
    } catch (const Error& e) {
      std::cerr << path.filename().string() << ": " << e.what() << "\n";
      if (status == kOk) status = exit_code_for(e.kind());
    }
  }
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    write_text_atomic(a.out, csv);
  }
  return status;
}

struct HenonPlotArgs {
  std::string sym, out;
  std::size_t n = 10000;
};

int cmd_henon_plot(const HenonPlotArgs& a) {
  require_writable_parent(a.out);
  const SymKey key = load_sym_key(a.sym);
  std::string csv = "x,y\n";
  henon_orbit(key, a.n, [&](const HenonState& s) {
    csv += detail::shortest(s.x);
    csv += ',';
    csv += detail::shortest(s.y);
    csv += '\n';
  });
  write_text_atomic(a.out, csv);
  return kOk;
}

struct SendArgs {
  std::string payload, to;
  std::optional<double> throttle;
};

int cmd_send(const SendArgs& a) {
  const auto [host, port] = split_host_port(a.to);
  const Bytes wire = read_file(a.payload);
  const auto t = timed([&] { send_frame(host, port, wire, a.throttle); });
  std::cout << "sent_bytes=" << wire.size() << " seconds=" << seconds_text(t.seconds) << "\n";
  return kOk;
}

struct RecvArgs {
  std::string out, bind = "0.0.0.0";
  std::uint16_t port = 0;
  std::optional<long> timeout_ms;
};

int cmd_recv(const RecvArgs& a) {
  require_writable_parent(a.out);
  FrameListener listener(a.port, a.bind);
  std::cout << "listening " << listener.port() << std::endl;
  std::optional<std::chrono::milliseconds> timeout;
  if (a.timeout_ms) timeout = std::chrono::milliseconds(*a.timeout_ms);
  const Bytes wire = listener.receive_one(timeout);
  (void)parse_payload(wire);
  write_file_atomic(a.out, wire);
  std::cout << "received_bytes=" << wire.size() << "\n";
  return kOk;
}

struct DatasetArgs {
  std::string out;
  std::size_t count = 200;
  std::size_t size = 32;
  std::uint64_t seed = 1;
};

int cmd_make_dataset(const DatasetArgs& a) {
  write_dataset(a.out, a.count, a.size, a.seed);
  return kOk;
}

struct ModelDctArgs {
  std::string out;
  std::size_t width = 256, height = 256, m = kDefaultLatentSize;
};

int cmd_model_dct(const ModelDctArgs& a) {
  require_writable_parent(a.out);
  save_model(a.out, CodecModel(DctCodec{a.width, a.height, a.m}));
  return kOk;
}

struct TrainArgs {
  std::string data, out;
  TrainConfig config;
  std::optional<double> lambda;
  std::vector<std::size_t> disc_hidden{16};
  double disc_learning_rate = 0.05;
};

int cmd_train(const TrainArgs& a) {
  require_writable_parent(a.out);
  std::vector<GrayImage> images;
  for (const auto& path : list_images(a.data)) images.push_back(read_image(path));
  double final_loss = 0.0;
  NeuralCodec model;
  if (a.lambda) {
    AdversarialConfig cfg;
    cfg.base = a.config;
    cfg.lambda = *a.lambda;
    cfg.disc_hidden = a.disc_hidden;
    cfg.disc_learning_rate = a.disc_learning_rate;
    auto result = train_adversarial(images, cfg);
    final_loss = result.loss_trace.back();
    std::cout << "gan_objective=" << result.objective_trace.back() << "\n";
    model = std::move(result.model);
  } else {
    auto result = train_autoencoder(images, a.config);
    final_loss = result.loss_trace.back();
    model = std::move(result.model);
  }
  save_model(a.out, CodecModel(std::move(model)));
  std::cout << "images=" << images.size() << " final_loss=" << final_loss << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latentseal: compress images to a latent vector, scramble it and seal it with ECIES"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "latentseal 0.1.0");

  KeygenArgs keygen;
  auto* keygen_cmd = app.add_subcommand("keygen", "write <prefix>.priv, <prefix>.pub and <prefix>.sym");
  keygen_cmd->add_option("--out", keygen.out, "key file prefix")->required();
  keygen_cmd->add_option("--seed", keygen.seed, "deterministic keys for reproducible runs");

  EncryptArgs enc;
  auto* enc_cmd = app.add_subcommand("encrypt", "image -> encrypted payload");
  enc_cmd->add_option("--image", enc.image, "P5/P6 input")->required();
  enc_cmd->add_option("--model", enc.model, "codec model file")->required();
  enc_cmd->add_option("--sym", enc.sym, "Henon key file")->required();
  enc_cmd->add_option("--pub", enc.pub, "recipient public key")->required();
  enc_cmd->add_option("--out", enc.out, "payload output")->required();

  DecryptArgs dec;
  auto* dec_cmd = app.add_subcommand("decrypt", "encrypted payload -> reconstructed P5 image");
  dec_cmd->add_option("--payload", dec.payload)->required();
  dec_cmd->add_option("--model", dec.model)->required();
  dec_cmd->add_option("--sym", dec.sym)->required();
  dec_cmd->add_option("--priv", dec.priv)->required();
  dec_cmd->add_option("--out", dec.out)->required();

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "quality/timing CSV for every image in a directory");
  ev_cmd->add_option("--dir", ev.dir)->required();
  ev_cmd->add_option("--model", ev.model)->required();
  ev_cmd->add_option("--sym", ev.sym)->required();
  ev_cmd->add_option("--pub", ev.pub)->required();
  ev_cmd->add_option("--priv", ev.priv)->required();
  ev_cmd->add_option("--out", ev.out, "CSV path (stdout if omitted)");
  ev_cmd->add_option("--window", ev.window, "SSIM window side; 0 = global statistics")
      ->check(CLI::Range(0, 65535));

  HenonPlotArgs plot;
  auto* plot_cmd = app.add_subcommand("henon-plot", "export post-burn-in (x, y) orbit points as CSV");
  plot_cmd->add_option("--sym", plot.sym)->required();
  plot_cmd->add_option("-n,--points", plot.n)->check(CLI::Range(std::size_t{0}, std::size_t{100000000}));
  plot_cmd->add_option("--out", plot.out)->required();

  SendArgs send;
  auto* send_cmd = app.add_subcommand("send", "send a payload file as one length-prefixed frame");
  send_cmd->add_option("--payload", send.payload)->required();
  send_cmd->add_option("--to", send.to, "host:port")->required();
  send_cmd->add_option("--throttle", send.throttle, "bytes per second")->check(CLI::PositiveNumber);

  RecvArgs recv;
  auto* recv_cmd = app.add_subcommand("recv", "receive one frame and write it after checking the payload header");
  recv_cmd->add_option("--port", recv.port, "0 picks a free port, printed on stdout");
  recv_cmd->add_option("--bind", recv.bind);
  recv_cmd->add_option("--out", recv.out)->required();
  recv_cmd->add_option("--timeout-ms", recv.timeout_ms)->check(CLI::Range(1L, 86400000L));

  DatasetArgs ds;
  auto* ds_cmd = app.add_subcommand("make-dataset", "write seeded synthetic P5 training images");
  ds_cmd->add_option("--out", ds.out)->required();
  ds_cmd->add_option("--count", ds.count)->check(CLI::Range(std::size_t{0}, std::size_t{1000000}));
  ds_cmd->add_option("--size", ds.size)->check(CLI::Range(std::size_t{1}, std::size_t{65535}));
  ds_cmd->add_option("--seed", ds.seed);

  ModelDctArgs mdct;
  auto* mdct_cmd = app.add_subcommand("model-dct", "write a DCT codec model file");
  mdct_cmd->add_option("--out", mdct.out)->required();
  mdct_cmd->add_option("--width", mdct.width)->check(CLI::Range(std::size_t{1}, std::size_t{65535}));
  mdct_cmd->add_option("--height", mdct.height)->check(CLI::Range(std::size_t{1}, std::size_t{65535}));
  mdct_cmd->add_option("-m", mdct.m)->check(CLI::Range(std::size_t{1}, std::size_t{65535}));

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train a neural codec on a directory of equally sized images");
  train_cmd->add_option("--data", train.data)->required();
  train_cmd->add_option("--out", train.out)->required();
  train_cmd->add_option("-m", train.config.m)->check(CLI::Range(std::size_t{1}, std::size_t{65535}));
  train_cmd->add_option("--hidden", train.config.hidden, "hidden widths, e.g. 256,128")->delimiter(',');
  train_cmd->add_option("--epochs", train.config.epochs)->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
  train_cmd->add_option("--batch", train.config.batch_size)->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
  train_cmd->add_option("--lr", train.config.learning_rate)->check(CLI::PositiveNumber);
  train_cmd->add_option("--seed", train.config.seed);
  train_cmd->add_option("--lambda", train.lambda, "enables adversarial training")->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--disc-hidden", train.disc_hidden)->delimiter(',');
  train_cmd->add_option("--disc-lr", train.disc_learning_rate)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*keygen_cmd) return cmd_keygen(keygen);
    if (*enc_cmd) return cmd_encrypt(enc);
    if (*dec_cmd) return cmd_decrypt(dec);
    if (*ev_cmd) return cmd_evaluate(ev);
    if (*plot_cmd) return cmd_henon_plot(plot);
    if (*send_cmd) return cmd_send(send);
    if (*recv_cmd) return cmd_recv(recv);
    if (*ds_cmd) return cmd_make_dataset(ds);
    if (*mdct_cmd) return cmd_model_dct(mdct);
    if (*train_cmd) return cmd_train(train);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
  return kUsage;
}
