#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <partition_lab/cache_io.hpp>

using namespace partition_lab;

TEST(CacheIo, ColumnRoundTrip)
{
    CountCache cache;
    auto const& col = cache.column(40, 2000);
    std::stringstream ss;
    write_column(ss, 40, col);
    auto const [m, back] = read_column(ss);
    EXPECT_EQ(m, 40);
    ASSERT_EQ(back.size(), col.size());
    for (std::size_t i = 0; i < col.size(); ++i)
        ASSERT_EQ(back[i], col[i]);
}

TEST(CacheIo, RejectsGarbage)
{
    std::stringstream bad("NOPE0000");
    EXPECT_THROW(read_column(bad), std::runtime_error);
    CountCache cache;
    std::stringstream full;
    write_column(full, 3, cache.column(3, 100));
    std::string const truncated = full.str().substr(0, full.str().size() / 2);
    std::stringstream cut(truncated);
    EXPECT_THROW(read_column(cut), std::runtime_error);
}

TEST(CacheIo, SaveAndLoadDirectory)
{
    auto const dir = std::filesystem::temp_directory_path() / "partition_lab_cache_test";
    std::filesystem::remove_all(dir);
    CountCache a;
    a.column(5, 300);
    a.column(7, 100);
    EXPECT_EQ(save_cache(dir, a), 2u);
    EXPECT_EQ(save_cache(dir, a), 0u);
    {
        std::ofstream junk(dir / "junk.plcc");
        junk << "garbage";
    }
    CountCache b;
    EXPECT_EQ(load_cache(dir, b), 2u);
    EXPECT_EQ(b.columns().at(5).size(), 301u);
    EXPECT_EQ(b.count_at_most(300, 5), a.count_at_most(300, 5));
    std::filesystem::remove_all(dir);
}
