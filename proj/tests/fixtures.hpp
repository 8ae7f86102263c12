#pragma once

#include <string>

// Shared source text for the running triple-cast example.
inline const std::string kTripleText =
    "<{x:Int|x mod 2 = 0} => {x:Int|x <> 0} @ l3> "
    "(<{x:Int|x >= 0} => {x:Int|x mod 2 = 0} @ l2> "
    "(<{x:Int|true} => {x:Int|x >= 0} @ l1> (-1)))";
