from trafficxai.cli import main

raise SystemExit(main())
