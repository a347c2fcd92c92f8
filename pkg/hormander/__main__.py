from hormander.main import main

main()
