#pragma once

#include "kakeya/sd/advanced.hpp"
#include "kakeya/sd/instance.hpp"
#include "kakeya/sd/pipelines.hpp"
#include "kakeya/sd/search.hpp"
#include "kakeya/sd/slope_tree.hpp"
