#pragma once

#include "omniplan/clf.hpp"
#include "omniplan/geometry.hpp"
#include "omniplan/grid_map.hpp"
#include "omniplan/map_io.hpp"
#include "omniplan/mission.hpp"
#include "omniplan/planner.hpp"
#include "omniplan/rng.hpp"
#include "omniplan/robots.hpp"
#include "omniplan/runtime.hpp"
#include "omniplan/scenario.hpp"
#include "omniplan/svg.hpp"
#include "omniplan/terrains.hpp"
#include "omniplan/udp_protocol.hpp"
