#include "support/fixtures.hpp"

#include <unistd.h>

#include <atomic>
#include <fstream>

#include "peagnn/errors.hpp"
#include "peagnn/rng.hpp"

namespace fs = std::filesystem;

namespace peagnn::testsupport {

namespace {

std::string unique_path(const std::string& stem) {
    static std::atomic<unsigned> counter{0};
    return (fs::temp_directory_path() /
            (stem + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++)))
        .string();
}

void write(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw peagnn::IngestError("fixture write failed: " + path);
    out << text;
}

}  // namespace

TempDir::TempDir(const std::string& stem) : path_(unique_path(stem)) {
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

void write_mini_movielens(const std::string& dir) {
    fs::create_directories(dir);
    write(dir + "/ratings.csv",
          "userId,movieId,rating,timestamp\n"
          "10,100,4.0,1\n"
          "10,200,3.5,2\n"
          "10,300,5.0,3\n"
          "10,400,2.0,4\n"
          "20,100,4.0,5\n"
          "20,200,3.0,6\n"
          "20,300,4.5,7\n"
          "30,200,2.5,8\n"
          "30,300,3.0,9\n"
          "30,400,4.0,10\n"
          "30,500,1.0,11\n"
          "40,600,5.0,12\n");
    write(dir + "/movies.csv",
          "movieId,title,genres\n"
          "100,Toy Story (1995),Adventure|Animation\n"
          "200,Heat (1995),Action|Crime\n"
          "300,Jumanji (1995),Adventure|Children\n"
          "400,Casino (1995),Crime|Drama\n"
          "500,\"Old One, The (1930)\",Drama\n"
          "600,Obscure (2001),Documentary\n"
          "601,No Year Given,(no genres listed)\n");
    write(dir + "/tags.csv",
          "userId,movieId,tag,timestamp\n"
          "10,100,funny,100\n"
          "10,100,Pixar ,101\n"
          "20,300,FUNNY,102\n"
          "40,600,rare,103\n");
}

void write_synthetic_movielens(const std::string& dir, std::size_t n_users, std::size_t n_items,
                               std::size_t n_flavors, std::uint64_t seed) {
    fs::create_directories(dir);
    peagnn::Rng rng(seed);
    std::string ratings = "userId,movieId,rating,timestamp\n";
    std::string tags = "userId,movieId,tag,timestamp\n";
    std::int64_t ts = 0;
    for (std::size_t u = 0; u < n_users; ++u) {
        const std::size_t pref = rng.below(n_flavors);
        std::vector<std::size_t> liked;
        for (std::size_t i = 0; i < n_items; ++i)
            if (i % n_flavors == pref) liked.push_back(i);
        rng.shuffle(liked);
        for (std::size_t i : liked)
            ratings += std::to_string(u + 1) + "," + std::to_string(i + 1) + ",4.0," +
                       std::to_string(++ts) + "\n";
        tags += std::to_string(u + 1) + "," + std::to_string(liked.front() + 1) + ",t" +
                std::to_string(pref) + "," + std::to_string(++ts) + "\n";
    }
    std::string movies = "movieId,title,genres\n";
    for (std::size_t i = 0; i < n_items; ++i) {
        const std::size_t flavor = i % n_flavors;
        movies += std::to_string(i + 1) + ",Synthetic Movie " + std::to_string(i + 1) + " (199" +
                  std::to_string(flavor) + "),G" + std::to_string(flavor) + "\n";
    }
    write(dir + "/ratings.csv", ratings);
    write(dir + "/movies.csv", movies);
    write(dir + "/tags.csv", tags);
}

void write_mini_movielens_enriched(const std::string& dir) {
    write_mini_movielens(dir);
    write(dir + "/extra_features.tsv",
          "100\tactor\tTom Hanks\n"
          "100\tdirector\tJohn Lasseter\n"
          "200\tactor\tAl Pacino\n"
          "200\tdirector\tMichael Mann\n"
          "300\twriter\tJonathan Hensleigh\n"
          "400\tactor\tRobert De Niro\n"
          "400\tdirector\tMartin Scorsese\n"
          "400\twriter\tNicholas Pileggi\n");
}

}  // namespace peagnn::testsupport
