#pragma once

#include "earthworm/checkpoint.hpp"
#include "earthworm/components.hpp"
#include "earthworm/coupling.hpp"
#include "earthworm/error.hpp"
#include "earthworm/hole_index.hpp"
#include "earthworm/oracle.hpp"
#include "earthworm/rng.hpp"
#include "earthworm/site.hpp"
#include "earthworm/stats.hpp"
#include "earthworm/sweep.hpp"
#include "earthworm/table_io.hpp"
#include "earthworm/worm.hpp"
