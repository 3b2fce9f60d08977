#pragma once

// Core library: geometry, coverage certification, spanning trees,
// constructions, optimizer and file formats. The session service
// (session.hpp, http_service.hpp) and the command line (cli.hpp) are
// included separately; they pull in cpp-httplib and CLI11.

#include "mdp/constructive.hpp"
#include "mdp/coverage.hpp"
#include "mdp/errors.hpp"
#include "mdp/geometry.hpp"
#include "mdp/io.hpp"
#include "mdp/optimizer.hpp"
#include "mdp/predicates.hpp"
#include "mdp/random.hpp"
#include "mdp/spanning.hpp"
