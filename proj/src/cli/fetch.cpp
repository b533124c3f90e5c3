#include <curl/curl.h>

#include <fstream>
#include <memory>
#include <mutex>
#include <ostream>

#include "alexbench/cli/cli.hpp"
#include "alexbench/data/dataset.hpp"
#include "alexbench/error.hpp"

namespace alexbench::cli {
namespace {

constexpr const char* kArchives[] = {"train-images-idx3-ubyte.gz", "train-labels-idx1-ubyte.gz",
                                     "t10k-images-idx3-ubyte.gz", "t10k-labels-idx1-ubyte.gz"};

std::size_t append(char* ptr, std::size_t size, std::size_t n, void* user) {
  auto* buf = static_cast<std::string*>(user);
  buf->append(ptr, size * n);
  return size * n;
}

std::string download(const std::string& url) {
  static std::once_flag init;
  std::call_once(init, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });
  std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> h(curl_easy_init(), curl_easy_cleanup);
  if (!h) throw Error(ErrorCode::IoError, "curl_easy_init failed");
  std::string body;
  curl_easy_setopt(h.get(), CURLOPT_URL, url.c_str());
  curl_easy_setopt(h.get(), CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(h.get(), CURLOPT_FAILONERROR, 1L);
  curl_easy_setopt(h.get(), CURLOPT_WRITEFUNCTION, append);
  curl_easy_setopt(h.get(), CURLOPT_WRITEDATA, &body);
  const CURLcode rc = curl_easy_perform(h.get());
  if (rc != CURLE_OK) throw Error(ErrorCode::IoError, url + ": " + curl_easy_strerror(rc));
  return body;
}

}  // namespace

std::string default_url(std::string_view dataset) {
  if (dataset == "mnist") return "https://storage.googleapis.com/cvdf-datasets/mnist/";
  if (dataset == "fmnist") return "http://fashion-mnist.s3-website.eu-central-1.amazonaws.com/";
  throw Error(ErrorCode::InvalidValue, "no download location for dataset '" + std::string(dataset) + "'");
}

void fetch_dataset(std::string_view dataset, const std::string& base_url, const std::filesystem::path& dest,
                   std::ostream& log) {
  std::error_code ec;
  std::filesystem::create_directories(dest, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dest.string());
  std::string base = base_url;
  if (!base.empty() && base.back() != '/') base += '/';
  for (const char* name : kArchives) {
    const std::string url = base + name;
    log << "fetching " << url << "\n";
    const std::string bytes = download(url);
    std::ofstream f(dest / name, std::ios::binary | std::ios::trunc);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + (dest / name).string());
  }
  const auto train = data::load_split(dest, data::Split::Train);
  const auto test = data::load_split(dest, data::Split::Test);
  log << dataset << ": " << train.size() << " train, " << test.size() << " test instances in " << dest.string()
      << "\n";
}

}  // namespace alexbench::cli
