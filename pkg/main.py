#!/usr/bin/env python3
from chatea import app

if __name__ == '__main__':
	app(prog_name='chatea')
