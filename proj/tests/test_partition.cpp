#include <gtest/gtest.h>

#include <partition_lab/partition.hpp>

using partition_lab::Partition;

TEST(Partition, StoresNonincreasingParts)
{
    Partition p({5, 3, 3}, 4);
    EXPECT_EQ(p.n(), 11);
    EXPECT_EQ(p.largest(), 5);
    EXPECT_EQ(p.length(), 3u);
    EXPECT_EQ(p.part_or_zero(2), 3);
    EXPECT_EQ(p.part_or_zero(3), 0);
    EXPECT_EQ(p.to_string(), "(5,3,3)");
}

TEST(Partition, EmptyIsZero)
{
    Partition p({}, 3);
    EXPECT_TRUE(p.empty());
    EXPECT_EQ(p.n(), 0);
    EXPECT_EQ(p.largest(), 0);
}

TEST(Partition, RejectsInvalidShapes)
{
    EXPECT_THROW(Partition({1, 2}, 3), std::invalid_argument);
    EXPECT_THROW(Partition({3, 0}, 3), std::invalid_argument);
    EXPECT_THROW(Partition({3, 2, 1}, 2), std::invalid_argument);
}
