#include <mpi.h>
#include <stdio.h>
double f(double x)
{
    return x * x;
}
int main(int argc, char *argv[])
{
    int rank, size, q, i, n = 1048576, local_n;
    double a = 0.0, b = 3.0, h, lo, part, sum;
    MPI_Init(&argc, &argv);
    MPI_Comm_rank(MPI_COMM_WORLD, &rank);
    MPI_Comm_size(MPI_COMM_WORLD, &size);
    h = (b - a) / n;
    local_n = n / size;
    lo = a + rank * local_n * h;
    part = (f(lo) + f(lo + local_n * h)) / 2.0;
    for (i = 1; i < local_n; i++)
    {
        part += f(lo + i * h);
    }
    part *= h;
    if (rank != 0)
    {
        MPI_Send(&part, 1, MPI_DOUBLE, 0, 0, MPI_COMM_WORLD);
    }
    else
    {
        sum = part;
        for (q = 1; q < size; q++)
        {
            MPI_Recv(&part, 1, MPI_DOUBLE, q, 0, MPI_COMM_WORLD, MPI_STATUS_IGNORE);
            sum += part;
        }
        printf("integral = %.10f\n", sum);
    }
    MPI_Finalize();
    return 0;
}
