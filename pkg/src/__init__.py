# HodgeBound source package
