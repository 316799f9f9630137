from mps2cl import main

main()
