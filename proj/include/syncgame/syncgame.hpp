#pragma once

#include "syncgame/correlation.hpp"
#include "syncgame/error.hpp"
#include "syncgame/game.hpp"
#include "syncgame/graph.hpp"
#include "syncgame/matrix.hpp"
#include "syncgame/optimization.hpp"
#include "syncgame/projection_calculus.hpp"
#include "syncgame/rational.hpp"
#include "syncgame/simplex.hpp"
#include "syncgame/version.hpp"
